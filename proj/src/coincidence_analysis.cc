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

#include "ffsim/coincidence_analysis.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "ffsim/errors.h"
#include "ffsim/event_sim.h"

namespace ffsim {

namespace {

std::vector<std::int64_t> times_in(const TagStream &stream, ChannelSet set) {
    std::vector<std::int64_t> out;
    for (const auto &tag : stream.tags) {
        if (set.contains(tag.channel)) out.push_back(static_cast<std::int64_t>(tag.timestamp_ps));
    }
    return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::uint64_t count_in(const std::vector<std::int64_t> &sorted, std::int64_t lo, std::int64_t hi) {
    auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto last = std::upper_bound(first, sorted.end(), hi);
    return static_cast<std::uint64_t>(last - first);
}

}  // namespace

std::int64_t CoincidenceHistogram::index_of(std::int64_t k) const {
    std::int64_t half = half_bins();
    if (k < -half || k >= half) return -1;
    return k + half;
}

std::uint64_t CoincidenceHistogram::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

CoincidenceHistogram correlate(const TagStream &stream, ChannelSet a, ChannelSet b, Picoseconds bin_width,
                               Picoseconds range) {
    if (bin_width <= 0 || range <= 0) {
        throw ParameterError("bin width and range must be positive");
    }
    if (range % bin_width != 0) {
        std::ostringstream msg;
        msg << "bin width " << bin_width << " ps does not divide range " << range << " ps";
        throw ParameterError(msg.str());
    }
    CoincidenceHistogram hist;
    hist.bin_width_ps = bin_width;
    hist.range_ps = range;
    hist.channel_a = a;
    hist.channel_b = b;
    hist.duration_ps = stream.duration_ps;
    const std::int64_t half = range / bin_width;
    hist.counts.assign(static_cast<std::size_t>(2 * half), 0);

    auto ta = times_in(stream, a);
    auto tb = times_in(stream, b);
    hist.singles_a = ta.size();
    hist.singles_b = tb.size();

    // Delay d lands in bin k = sign(d) floor((2|d| + w) / 2w); keeping k in
    // [-K, K) means -(2K+1)w < 2d < (2K-1)w.
    const std::int64_t w = bin_width;
    const std::int64_t lower2 = -(2 * half + 1) * w;
    const std::int64_t upper2 = (2 * half - 1) * w;
    std::size_t start = 0;
    for (std::int64_t t : ta) {
        while (start < tb.size() && 2 * (tb[start] - t) <= lower2) ++start;
        for (std::size_t j = start; j < tb.size(); ++j) {
            std::int64_t d = tb[j] - t;
            if (2 * d >= upper2) break;
            std::int64_t mag = (2 * (d < 0 ? -d : d) + w) / (2 * w);
            std::int64_t k = d < 0 ? -mag : mag;
            ++hist.counts[static_cast<std::size_t>(k + half)];
        }
    }
    return hist;
}

std::vector<PeakCount> integrate_peaks(const CoincidenceHistogram &hist, Picoseconds rep_period,
                                       Picoseconds peak_halfwidth) {
    if (rep_period <= 0 || rep_period % hist.bin_width_ps != 0) {
        throw ParameterError("repetition period must be a positive multiple of the bin width");
    }
    if (peak_halfwidth < 0 || 2 * peak_halfwidth >= rep_period) {
        throw ParameterError("peak integration windows overlap (need 2 * halfwidth < repetition period)");
    }
    const std::int64_t per_peak = rep_period / hist.bin_width_ps;
    const std::int64_t reach = peak_halfwidth / hist.bin_width_ps;
    const std::int64_t half = hist.half_bins();
    std::vector<PeakCount> peaks;
    for (std::int64_t m = floor_div(-half, per_peak) - 1; m <= ceil_div(half, per_peak) + 1; ++m) {
        std::int64_t centre = m * per_peak;
        if (hist.index_of(centre - reach) < 0 || hist.index_of(centre + reach) < 0) continue;
        std::uint64_t sum = 0;
        for (std::int64_t k = centre - reach; k <= centre + reach; ++k) {
            sum += hist.counts[static_cast<std::size_t>(hist.index_of(k))];
        }
        peaks.push_back({m, sum});
    }
    return peaks;
}

std::vector<G2Point> g2_tau(const CoincidenceHistogram &hist, Picoseconds rep_period, double rep_rate_hz,
                            Picoseconds peak_halfwidth) {
    if (hist.singles_a == 0 || hist.singles_b == 0) {
        throw UndefinedStatisticError("g2(tau) is undefined without singles on both channels");
    }
    if (hist.duration_ps == 0) {
        throw UndefinedStatisticError("g2(tau) needs the acquisition duration");
    }
    const double duration_s = static_cast<double>(hist.duration_ps) * 1e-12;
    const double rate_a = static_cast<double>(hist.singles_a) / duration_s;
    const double rate_b = static_cast<double>(hist.singles_b) / duration_s;
    std::vector<G2Point> out;
    for (const auto &peak : integrate_peaks(hist, rep_period, peak_halfwidth)) {
        double coincidence_rate = static_cast<double>(peak.counts) / duration_s;
        out.push_back({peak.offset, peak.counts, coincidence_rate * rep_rate_hz / (rate_a * rate_b)});
    }
    return out;
}

RegionRates herald_conditioned_rates(const TagStream &stream, const ExperimentConfig &config) {
    std::vector<Picoseconds> heralds = times_in(stream, Channel::kHeraldTrigger);
    if (heralds.empty()) {
        throw EmptyEnsembleError("no herald tags in stream; gate state cannot be reconstructed");
    }
    const Picoseconds rep = config.rep_period_ps;
    const Picoseconds delay = config.signal_delay_ps;
    const auto n_slots = static_cast<std::int64_t>(config.n_pulses);
    GateTimeline timeline(heralds, config.latency_ps, config.gate_length_ps);

    auto is_herald_slot = [&](std::int64_t p) {
        return std::binary_search(heralds.begin(), heralds.end(), p * rep);
    };
    auto slot_open = [&](std::int64_t p) { return timeline.is_open(p * rep + delay); };

    RegionRates r;
    std::uint64_t open_total = 0;
    for (const auto &iv : timeline.intervals()) {
        std::int64_t first = std::max<std::int64_t>(0, ceil_div(iv.start - delay, rep));
        std::int64_t last = std::min<std::int64_t>(n_slots, ceil_div(iv.end - delay, rep));
        if (last > first) open_total += static_cast<std::uint64_t>(last - first);
    }
    std::uint64_t correlated_open = 0;
    for (Picoseconds h : heralds) {
        std::int64_t p = h / rep;
        if (h % rep != 0 || p >= n_slots) continue;
        ++r.correlated_slots;
        if (slot_open(p)) ++correlated_open;
    }
    r.open_slots = open_total - correlated_open;
    r.closed_slots = static_cast<std::uint64_t>(n_slots) - open_total - (r.correlated_slots - correlated_open);

    for (const auto &tag : stream.tags) {
        if (tag.channel == Channel::kHeraldTrigger) continue;
        std::int64_t p = floor_div(static_cast<std::int64_t>(tag.timestamp_ps) - delay + rep / 2, rep);
        if (p < 0 || p >= n_slots) continue;
        if (is_herald_slot(p)) {
            ++r.correlated_counts;
        } else if (slot_open(p)) {
            ++r.open_counts;
        } else {
            ++r.closed_counts;
        }
    }
    const double slot_seconds = static_cast<double>(rep) * 1e-12;
    auto rate = [&](std::uint64_t counts, std::uint64_t slots) {
        return slots == 0 ? 0.0 : static_cast<double>(counts) / (static_cast<double>(slots) * slot_seconds);
    };
    r.open_rate = rate(r.open_counts, r.open_slots);
    r.closed_rate = rate(r.closed_counts, r.closed_slots);
    r.correlated_rate = rate(r.correlated_counts, r.correlated_slots);
    return r;
}

std::vector<HeraldedG2Point> heralded_g2(const TagStream &stream, const ExperimentConfig &config,
                                         std::int64_t max_offset, Picoseconds window) {
    if (max_offset < 0 || window < 0 || 2 * window >= config.rep_period_ps) {
        throw ParameterError("heralded g2 needs max_offset >= 0 and 0 <= 2 * window < repetition period");
    }
    std::vector<std::int64_t> heralds = times_in(stream, Channel::kHeraldTrigger);
    if (heralds.empty()) {
        throw EmptyEnsembleError("no herald tags in stream");
    }
    std::vector<std::int64_t> ta = times_in(stream, Channel::kHbtA);
    std::vector<std::int64_t> tb = times_in(stream, Channel::kHbtB);
    const std::int64_t rep = config.rep_period_ps;
    const std::int64_t delay = config.signal_delay_ps;

    const std::size_t n_offsets = static_cast<std::size_t>(2 * max_offset + 1);
    std::uint64_t singles_a = 0;
    std::vector<std::uint64_t> singles_b(n_offsets, 0);
    std::vector<std::uint64_t> coincidences(n_offsets, 0);
    for (std::int64_t h : heralds) {
        std::int64_t arrival = h + delay;
        std::uint64_t a = count_in(ta, arrival - window, arrival + window);
        singles_a += a;
        for (std::int64_t m = -max_offset; m <= max_offset; ++m) {
            std::int64_t centre = arrival + m * rep;
            std::uint64_t b = count_in(tb, centre - window, centre + window);
            singles_b[static_cast<std::size_t>(m + max_offset)] += b;
            coincidences[static_cast<std::size_t>(m + max_offset)] += a * b;
        }
    }
    std::vector<HeraldedG2Point> out;
    const auto n_h = static_cast<double>(heralds.size());
    for (std::int64_t m = -max_offset; m <= max_offset; ++m) {
        auto i = static_cast<std::size_t>(m + max_offset);
        HeraldedG2Point point{m, heralds.size(), singles_a, singles_b[i], coincidences[i],
                              std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        if (singles_a > 0 && singles_b[i] > 0) {
            double scale = n_h / (static_cast<double>(singles_a) * static_cast<double>(singles_b[i]));
            point.g2 = static_cast<double>(coincidences[i]) * scale;
            point.sigma = std::sqrt(std::max<double>(static_cast<double>(coincidences[i]), 1.0)) * scale;
        }
        out.push_back(point);
    }
    return out;
}

TagStream isolate_heralds(const TagStream &stream, Picoseconds guard) {
    if (guard < 0) {
        throw ParameterError("isolation guard must be >= 0");
    }
    std::vector<std::int64_t> heralds = times_in(stream, Channel::kHeraldTrigger);
    TagStream out;
    out.duration_ps = stream.duration_ps;
    out.tags.reserve(stream.tags.size());
    for (const auto &tag : stream.tags) {
        if (tag.channel == Channel::kHeraldTrigger) {
            auto t = static_cast<std::int64_t>(tag.timestamp_ps);
            // Counts the tag itself, so isolation means exactly one in range.
            if (count_in(heralds, t - guard + 1, t + guard - 1) > 1) continue;
        }
        out.tags.push_back(tag);
    }
    return out;
}

Picoseconds isolation_guard(const ExperimentConfig &config, Picoseconds range) {
    return range + config.latency_ps + config.gate_length_ps;
}

CoincidenceHistogram merge(const CoincidenceHistogram &a, const CoincidenceHistogram &b) {
    if (a.bin_width_ps != b.bin_width_ps || a.range_ps != b.range_ps || a.counts.size() != b.counts.size()) {
        throw ParameterError("cannot merge histograms with different binning");
    }
    CoincidenceHistogram out = a;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
    out.singles_a += b.singles_a;
    out.singles_b += b.singles_b;
    out.duration_ps += b.duration_ps;
    return out;
}

void write_histogram_csv(std::ostream &out, const CoincidenceHistogram &hist) {
    out << "bin_center_ps,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out << hist.bin_center(i) << "," << hist.counts[i] << "\n";
    }
}

void write_peaks_csv(std::ostream &out, const std::vector<G2Point> &peaks) {
    out << "peak_offset,counts,g2\n" << std::setprecision(10);
    for (const auto &p : peaks) {
        out << p.offset << "," << p.counts << "," << p.g2 << "\n";
    }
}

}  // namespace ffsim
