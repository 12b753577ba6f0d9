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

#ifndef FFSIM_COINCIDENCE_ANALYSIS_H
#define FFSIM_COINCIDENCE_ANALYSIS_H

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <vector>

#include "ffsim/experiment_config.h"
#include "ffsim/time_tags.h"

namespace ffsim {

/// A set of channels treated as one detector (e.g. both HBT outputs).
class ChannelSet {
   public:
    ChannelSet(Channel channel) : mask_(bit(channel)) {}  // NOLINT: implicit by design of call sites
    ChannelSet(std::initializer_list<Channel> channels) {
        for (Channel c : channels) mask_ |= bit(c);
    }
    bool contains(Channel c) const { return (mask_ & bit(c)) != 0; }
    bool operator==(const ChannelSet &) const = default;

   private:
    static std::uint8_t bit(Channel c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
    std::uint8_t mask_ = 0;
};

/// Histogram of t_b - t_a over all tag pairs.
///
/// Bins are centered on multiples of bin_width: bin k collects delays that
/// round (half away from zero) to k * bin_width, for k in [-K, K) with
/// K = range / bin_width. Swapping a and b maps bin k to bin -k exactly.
struct CoincidenceHistogram {
    Picoseconds bin_width_ps = 250;
    Picoseconds range_ps = 100'000;
    std::vector<std::uint64_t> counts;
    ChannelSet channel_a = Channel::kHbtA;
    ChannelSet channel_b = Channel::kHbtB;
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    std::uint64_t duration_ps = 0;

    std::int64_t half_bins() const { return range_ps / bin_width_ps; }
    /// Index of the bin centred on delay k * bin_width, or -1 if outside.
    std::int64_t index_of(std::int64_t k) const;
    Picoseconds bin_center(std::size_t index) const {
        return (static_cast<std::int64_t>(index) - half_bins()) * bin_width_ps;
    }
    std::uint64_t total() const;
};

CoincidenceHistogram correlate(const TagStream &stream, ChannelSet a, ChannelSet b, Picoseconds bin_width,
                               Picoseconds range);

struct PeakCount {
    std::int64_t offset;  // pulses from tau = 0
    std::uint64_t counts;
};

/// Sums the bins whose centres lie within +-peak_halfwidth of each multiple
/// of rep_period. Only peaks whose whole window fits the histogram appear.
std::vector<PeakCount> integrate_peaks(const CoincidenceHistogram &hist, Picoseconds rep_period,
                                       Picoseconds peak_halfwidth = 1'000);

struct G2Point {
    std::int64_t offset;
    std::uint64_t counts;
    double g2;
};

/// g2(tau) ~ C_ab(tau) f_rep / (C_a C_b) with all rates taken over the full
/// stream duration.
std::vector<G2Point> g2_tau(const CoincidenceHistogram &hist, Picoseconds rep_period, double rep_rate_hz,
                            Picoseconds peak_halfwidth = 1'000);

/// HBT tags classified by the pulse slot they fall into: the slot of the
/// herald itself (correlated), other slots inside a reconstructed gate
/// (open), and the rest (closed). Rates are counts per slot-second.
struct RegionRates {
    double open_rate = 0;
    double closed_rate = 0;
    double correlated_rate = 0;
    std::uint64_t open_counts = 0;
    std::uint64_t closed_counts = 0;
    std::uint64_t correlated_counts = 0;
    std::uint64_t open_slots = 0;
    std::uint64_t closed_slots = 0;
    std::uint64_t correlated_slots = 0;
};

RegionRates herald_conditioned_rates(const TagStream &stream, const ExperimentConfig &config);

/// Herald-conditioned HBT correlation. For each herald at pulse q the HBT A
/// tags within +-window of pulse q's arrival and the HBT B tags within
/// +-window of pulse q+offset's arrival are counted; then
/// g2 = N_h N_ab / (N_a N_b). At offset 0 this is the zero-delay g2 of the
/// heralded signal photon-number distribution.
struct HeraldedG2Point {
    std::int64_t offset;
    std::uint64_t heralds;
    std::uint64_t singles_a;
    std::uint64_t singles_b;
    std::uint64_t coincidences;
    double g2;     // NaN when singles_a or singles_b is zero
    double sigma;  // Poisson counting error on coincidences, propagated
};

std::vector<HeraldedG2Point> heralded_g2(const TagStream &stream, const ExperimentConfig &config,
                                         std::int64_t max_offset = 0, Picoseconds window = 1'000);

/// Adds bin counts and singles of two histograms with identical binning.
/// Copy of `stream` keeping only herald tags with no other herald closer than
/// `guard` on either side. Other channels are untouched.
TagStream isolate_heralds(const TagStream &stream, Picoseconds guard);

/// Guard that keeps every peak within +-range of a herald free of other
/// heralds' gates.
Picoseconds isolation_guard(const ExperimentConfig &config, Picoseconds range);

CoincidenceHistogram merge(const CoincidenceHistogram &a, const CoincidenceHistogram &b);

void write_histogram_csv(std::ostream &out, const CoincidenceHistogram &hist);
void write_peaks_csv(std::ostream &out, const std::vector<G2Point> &peaks);

}  // namespace ffsim

#endif
