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

#include "ffsim/feedforward_analytic.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ffsim/errors.h"

namespace ffsim {

namespace {

std::size_t parse_count(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParameterError("bad click count '" + std::string(text) + "' in herald selection");
    }
    return value;
}

}  // namespace

HeraldSelection::HeraldSelection(std::vector<std::size_t> accepted_clicks, std::string label)
    : accepted_(std::move(accepted_clicks)), label_(std::move(label)) {
    std::sort(accepted_.begin(), accepted_.end());
    accepted_.erase(std::unique(accepted_.begin(), accepted_.end()), accepted_.end());
    if (accepted_.empty()) {
        throw ParameterError("herald selection must accept at least one click count");
    }
    if (label_.empty()) {
        std::ostringstream out;
        for (std::size_t i = 0; i < accepted_.size(); ++i) {
            out << (i ? "," : "") << accepted_[i];
        }
        label_ = out.str();
    }
}

HeraldSelection HeraldSelection::exactly(std::size_t clicks) {
    return HeraldSelection({clicks}, std::to_string(clicks));
}

HeraldSelection HeraldSelection::at_least(std::size_t clicks, std::size_t max_clicks) {
    if (clicks > max_clicks) {
        throw ParameterError("herald selection lower bound exceeds the click range");
    }
    std::vector<std::size_t> accepted;
    for (std::size_t k = clicks; k <= max_clicks; ++k) {
        accepted.push_back(k);
    }
    return HeraldSelection(std::move(accepted), ">=" + std::to_string(clicks));
}

HeraldSelection HeraldSelection::parse(std::string_view text, std::size_t max_clicks) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) {
        throw ParameterError("empty herald selection");
    }
    if (text == "all") {
        return HeraldSelection::at_least(0, max_clicks);
    }
    if (text.starts_with(">=")) {
        return HeraldSelection::at_least(parse_count(text.substr(2)), max_clicks);
    }
    std::vector<std::size_t> accepted;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        accepted.push_back(parse_count(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    HeraldSelection sel(std::move(accepted), "");
    sel.check_against(max_clicks);
    return sel;
}

bool HeraldSelection::accepts(std::size_t clicks) const {
    return std::binary_search(accepted_.begin(), accepted_.end(), clicks);
}

void HeraldSelection::check_against(std::size_t max_clicks) const {
    if (max_accepted() > max_clicks) {
        std::ostringstream msg;
        msg << "herald selection '" << label_ << "' accepts " << max_accepted()
            << " clicks but the detector resolves at most " << max_clicks;
        throw ParameterError(msg.str());
    }
}

HeraldedState heralded_distribution(const PhotonNumberDistribution &source, const DetectionMatrix &det,
                                    const HeraldSelection &sel) {
    if (source.n_max() != det.n_max()) {
        std::ostringstream msg;
        msg << "source truncation n_max=" << source.n_max() << " differs from detection matrix n_max="
            << det.n_max();
        throw ParameterError(msg.str());
    }
    sel.check_against(det.max_clicks());
    std::vector<double> weights(source.n_max() + 1, 0.0);
    double acceptance = 0;
    for (std::size_t n = 0; n <= source.n_max(); ++n) {
        double fire = 0;
        for (std::size_t k : sel.accepted_clicks()) {
            fire += det.entries(n, k);
        }
        weights[n] = source[n] * fire;
        acceptance += weights[n];
    }
    if (acceptance <= 0) {
        throw EmptyEnsembleError("herald selection '" + sel.label() + "' never fires for this source");
    }
    return {renormalize(weights), acceptance};
}

std::vector<SweepPoint> g2_sweep(const DetectionMatrix &det, const HeraldSelection &sel,
                                 const std::vector<double> &means, SourceFamily family) {
    if (!std::is_sorted(means.begin(), means.end())) {
        throw ParameterError("sweep means must be sorted ascending");
    }
    std::vector<SweepPoint> out;
    out.reserve(means.size());
    for (double mean : means) {
        if (!(mean > 0)) {
            throw ParameterError("sweep means must be positive");
        }
        auto source = source_distribution(family, mean, det.n_max());
        auto heralded = heralded_distribution(source, det, sel);
        out.push_back({mean, g2_zero(heralded.distribution), heralded.acceptance});
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0) || !(hi >= lo) || points == 0) {
        throw ParameterError("log grid needs 0 < lo <= hi and at least one point");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> grid(points);
    double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> default_mean_grid() { return log_grid(1e-4, 1.0, 30); }

void write_sweep_csv(std::ostream &out, const std::vector<SweepPoint> &points, const HeraldSelection &sel,
                     SourceFamily family) {
    out << "mean,g2,acceptance,selection_label,family\n";
    out << std::setprecision(10);
    for (const auto &p : points) {
        out << p.mean << "," << p.g2 << "," << p.acceptance << "," << sel.label() << "," << to_string(family)
            << "\n";
    }
}

double genuine_two_click_fraction(double single_rate, double double_rate, double crosstalk_prob) {
    if (!(single_rate > 0) || !(double_rate > 0)) {
        throw ParameterError("click rates must be positive");
    }
    if (!(crosstalk_prob >= 0 && crosstalk_prob < 1)) {
        throw ParameterError("crosstalk probability must lie in [0, 1)");
    }
    double crosstalk_doubles = single_rate * crosstalk_prob / (1.0 - crosstalk_prob);
    if (crosstalk_doubles > double_rate) {
        std::ostringstream msg;
        msg << "inferred crosstalk double rate " << crosstalk_doubles << " exceeds observed double rate "
            << double_rate;
        throw InconsistencyError(msg.str());
    }
    return std::clamp(1.0 - crosstalk_doubles / double_rate, 0.0, 1.0);
}

}  // namespace ffsim
