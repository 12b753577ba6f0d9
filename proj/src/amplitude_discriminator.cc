// Copyright 2026 The ffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ffsim/amplitude_discriminator.h"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "ffsim/errors.h"

namespace ffsim {

namespace {

// P(X < x) for X ~ N(mean, sigma); sigma == 0 degenerates to a step at mean.
double normal_cdf(double x, double mean, double sigma) {
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    if (sigma == 0) {
        return mean < x ? 1.0 : 0.0;
    }
    return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

bool is_monotone(const std::vector<double> &grid) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            return false;
        }
    }
    return true;
}

}  // namespace

void AmplitudeModel::validate() const {
    if (!(unit_amplitude > 0)) {
        throw ParameterError("unit amplitude must be positive");
    }
    if (!(noise_sigma >= 0)) {
        throw ParameterError("noise sigma must be non-negative");
    }
}

void TriggerWindow::validate() const {
    if (!(low_threshold < high_threshold)) {
        throw ParameterError("trigger window needs low threshold < high threshold");
    }
}

double trigger_probability(std::size_t clicks, const TriggerWindow &window, const AmplitudeModel &model) {
    model.validate();
    window.validate();
    double mean = model.baseline + static_cast<double>(clicks) * model.unit_amplitude;
    // P(low <= X < high). For sigma == 0 the step convention puts X == low inside.
    if (model.noise_sigma == 0) {
        return (mean >= window.low_threshold && mean < window.high_threshold) ? 1.0 : 0.0;
    }
    double upper = normal_cdf(window.high_threshold, mean, model.noise_sigma);
    double lower = normal_cdf(window.low_threshold, mean, model.noise_sigma);
    // Use the upper tail directly when both bounds sit above the mean so that
    // tiny probabilities do not cancel to zero.
    if (window.low_threshold > mean) {
        double s = model.noise_sigma * std::sqrt(2.0);
        double tail_low = 0.5 * std::erfc((window.low_threshold - mean) / s);
        double tail_high =
            std::isinf(window.high_threshold) ? 0.0 : 0.5 * std::erfc((window.high_threshold - mean) / s);
        return std::max(0.0, tail_low - tail_high);
    }
    return std::max(0.0, upper - lower);
}

std::vector<double> click_distribution(const PhotonNumberDistribution &source, const DetectionMatrix &det) {
    if (source.n_max() != det.n_max()) {
        throw ParameterError("source truncation differs from detection matrix");
    }
    std::vector<double> clicks(det.max_clicks() + 1, 0.0);
    for (std::size_t n = 0; n <= det.n_max(); ++n) {
        for (std::size_t k = 0; k <= det.max_clicks(); ++k) {
            clicks[k] += source[n] * det.entries(n, k);
        }
    }
    return clicks;
}

RateSurface threshold_sweep(const PhotonNumberDistribution &source, const DetectionMatrix &det,
                            const AmplitudeModel &model, double rep_rate_hz, const std::vector<double> &low_grid,
                            const std::vector<double> &high_grid) {
    model.validate();
    if (!(rep_rate_hz > 0)) {
        throw ParameterError("repetition rate must be positive");
    }
    if (!is_monotone(low_grid) || !is_monotone(high_grid)) {
        throw ParameterError("threshold grids must be strictly increasing");
    }
    auto clicks = click_distribution(source, det);
    RateSurface surface{low_grid, high_grid, std::vector<double>(low_grid.size() * high_grid.size(), 0.0)};
    for (std::size_t l = 0; l < low_grid.size(); ++l) {
        for (std::size_t h = 0; h < high_grid.size(); ++h) {
            if (!(low_grid[l] < high_grid[h])) {
                continue;
            }
            TriggerWindow window{low_grid[l], high_grid[h]};
            double rate = 0;
            for (std::size_t k = 0; k < clicks.size(); ++k) {
                rate += clicks[k] * trigger_probability(k, window, model);
            }
            surface.rates_hz[l * high_grid.size() + h] = rep_rate_hz * rate;
        }
    }
    return surface;
}

std::vector<Plateau> find_plateaus(const std::vector<double> &values, double rel_tolerance,
                                   std::size_t min_length) {
    std::vector<Plateau> out;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {  // run is [start, end)
        if (end - start >= min_length) {
            double sum = 0;
            for (std::size_t i = start; i < end; ++i) sum += values[i];
            out.push_back({start, end - 1, sum / static_cast<double>(end - start)});
        }
    };
    for (std::size_t i = 1; i <= values.size(); ++i) {
        bool continues = false;
        if (i < values.size()) {
            double a = values[i - 1];
            double b = values[i];
            continues = std::abs(a - b) <= rel_tolerance * std::max(std::abs(a), std::abs(b));
        }
        if (!continues) {
            flush(i);
            start = i;
        }
    }
    return out;
}

void write_surface_csv(std::ostream &out, const RateSurface &surface) {
    out << "low,high,rate_hz\n" << std::setprecision(10);
    for (std::size_t l = 0; l < surface.low_grid.size(); ++l) {
        for (std::size_t h = 0; h < surface.high_grid.size(); ++h) {
            out << surface.low_grid[l] << ",";
            if (std::isinf(surface.high_grid[h])) {
                out << "inf";
            } else {
                out << surface.high_grid[h];
            }
            out << "," << surface.at(l, h) << "\n";
        }
    }
}

}  // namespace ffsim
