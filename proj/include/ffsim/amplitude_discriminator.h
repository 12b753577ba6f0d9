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

#ifndef FFSIM_AMPLITUDE_DISCRIMINATOR_H
#define FFSIM_AMPLITUDE_DISCRIMINATOR_H

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "ffsim/detector_model.h"
#include "ffsim/photon_stats.h"

namespace ffsim {

/// Pulse height of the summed array output: baseline + clicks * unit_amplitude
/// plus zero-mean Gaussian noise. Volts throughout.
struct AmplitudeModel {
    double unit_amplitude = 1.0;
    double noise_sigma = 0.05;
    double baseline = 0.0;

    /// Noise at 5% of the single-pixel amplitude.
    static AmplitudeModel with_default_noise(double unit_amplitude, double baseline = 0.0) {
        return {unit_amplitude, 0.05 * unit_amplitude, baseline};
    }

    void validate() const;
};

/// Lower and upper discriminator thresholds. The window accepts amplitudes
/// in [low, high); high may be +infinity for "k or more".
struct TriggerWindow {
    double low_threshold;
    double high_threshold = std::numeric_limits<double>::infinity();

    void validate() const;
};

double trigger_probability(std::size_t clicks, const TriggerWindow &window, const AmplitudeModel &model);

/// Count rate over a grid of (low, high) thresholds. Grid cells with
/// low >= high describe a window that can never fire and hold zero.
struct RateSurface {
    std::vector<double> low_grid;
    std::vector<double> high_grid;
    std::vector<double> rates_hz;  // row-major, rates_hz[l * high_grid.size() + h]

    double at(std::size_t l, std::size_t h) const { return rates_hz[l * high_grid.size() + h]; }
};

RateSurface threshold_sweep(const PhotonNumberDistribution &source, const DetectionMatrix &det,
                            const AmplitudeModel &model, double rep_rate_hz, const std::vector<double> &low_grid,
                            const std::vector<double> &high_grid);

/// Click-number marginal sum_n P(n) p(n, k).
std::vector<double> click_distribution(const PhotonNumberDistribution &source, const DetectionMatrix &det);

struct Plateau {
    std::size_t first;  // grid indices, inclusive
    std::size_t last;
    double level;
};

/// Maximal runs of at least min_length points along which consecutive
/// values differ by at most rel_tolerance of the larger one.
std::vector<Plateau> find_plateaus(const std::vector<double> &values, double rel_tolerance = 1e-3,
                                   std::size_t min_length = 5);

/// Rows of (low, high, rate_hz); an infinite high threshold is written as "inf".
void write_surface_csv(std::ostream &out, const RateSurface &surface);

}  // namespace ffsim

#endif
