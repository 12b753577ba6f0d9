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

#ifndef FFSIM_FEEDFORWARD_ANALYTIC_H
#define FFSIM_FEEDFORWARD_ANALYTIC_H

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ffsim/detector_model.h"
#include "ffsim/photon_stats.h"

namespace ffsim {

/// The set of click counts for which the discriminator fires the modulator.
class HeraldSelection {
   public:
    HeraldSelection(std::vector<std::size_t> accepted_clicks, std::string label);

    static HeraldSelection exactly(std::size_t clicks);
    /// clicks, clicks+1, ..., max_clicks.
    static HeraldSelection at_least(std::size_t clicks, std::size_t max_clicks);
    /// Parses "2", "1,2", ">=1" (bounded by max_clicks) or "all".
    static HeraldSelection parse(std::string_view text, std::size_t max_clicks);

    bool accepts(std::size_t clicks) const;
    const std::vector<std::size_t> &accepted_clicks() const { return accepted_; }
    std::size_t max_accepted() const { return accepted_.back(); }
    const std::string &label() const { return label_; }

    /// Throws ParameterError if a member exceeds the detector's click range.
    void check_against(std::size_t max_clicks) const;

   private:
    std::vector<std::size_t> accepted_;  // sorted, unique, non-empty
    std::string label_;
};

struct HeraldedState {
    PhotonNumberDistribution distribution;
    /// Probability per pulse that the herald fires (mass before renormalization).
    double acceptance;
};

/// P'(n) proportional to P(n) sum_{n' in sel} p(n, n'), assuming the idler
/// and signal photon numbers are equal. Throws EmptyEnsembleError if the
/// herald can never fire.
HeraldedState heralded_distribution(const PhotonNumberDistribution &source, const DetectionMatrix &det,
                                    const HeraldSelection &sel);

struct SweepPoint {
    double mean;
    double g2;
    double acceptance;
};

std::vector<SweepPoint> g2_sweep(const DetectionMatrix &det, const HeraldSelection &sel,
                                 const std::vector<double> &means, SourceFamily family);

/// Log-spaced grid, inclusive of both ends.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Default sweep grid: 30 log-spaced means over [1e-4, 1].
std::vector<double> default_mean_grid();

void write_sweep_csv(std::ostream &out, const std::vector<SweepPoint> &points, const HeraldSelection &sel,
                     SourceFamily family);

/// Fraction of observed two-click heralds that come from genuine photon
/// pairs, given the observed single- and double-click rates and the
/// crosstalk probability. The crosstalk-induced double rate is inferred as
/// single_rate * eps / (1 - eps). Throws InconsistencyError when that
/// inferred rate exceeds the observed double rate.
double genuine_two_click_fraction(double single_rate, double double_rate, double crosstalk_prob);

}  // namespace ffsim

#endif
