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

#include "ffsim/event_sim.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "ffsim/errors.h"
#include "ffsim/photon_stats.h"

namespace ffsim {

namespace {

enum StreamPurpose : std::uint32_t { kPulseStream = 0, kDarkStream = 1 };

// Tail mass left out of the sampled pair-number table.
constexpr double kSamplerTailTolerance = 1e-15;

struct PendingPhoton {
    std::uint64_t pulse;
    double u_gate;
    Picoseconds jitter;
    Channel channel;
};

struct BatchOutput {
    std::vector<std::uint64_t> herald_pulses;
    std::vector<PendingPhoton> photons;
    std::vector<TimeTagRecord> tags;  // dark counts, then gated HBT tags
    std::vector<std::uint64_t> clicks;
    std::uint64_t dark[2] = {0, 0};
};

/// Pair-number sampler. With `skip_vacuum` the caller jumps over vacuum
/// pulses with a geometric gap and draws n >= 1 from the conditional table.
class PairSampler {
   public:
    PairSampler(SourceFamily family, double mean) {
        std::size_t n_max = required_n_max(family, mean, kSamplerTailTolerance);
        auto dist = source_distribution(family, mean, n_max, kSamplerTailTolerance);
        auto probs = dist.probs();
        for (std::size_t n = 1; n < probs.size(); ++n) {
            non_vacuum_ += probs[n];
        }
        double acc = 0;
        for (std::size_t n = 0; n < probs.size(); ++n) {
            acc += probs[n];
            full_cdf_.push_back(acc);
        }
        acc = 0;
        for (std::size_t n = 1; n < probs.size(); ++n) {
            acc += probs[n];
            conditional_cdf_.push_back(non_vacuum_ > 0 ? acc / non_vacuum_ : 1.0);
        }
        log_vacuum_ = std::log1p(-std::min(non_vacuum_, 1.0));
    }

    double non_vacuum() const { return non_vacuum_; }

    /// Vacuum pulses before the next non-vacuum pulse.
    std::uint64_t vacuum_gap(StreamRng &rng) const {
        if (non_vacuum_ >= 1.0 || std::isinf(log_vacuum_)) return 0;
        double gap = std::floor(std::log(rng.uniform_open_zero()) / log_vacuum_);
        return gap >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(gap);
    }

    std::size_t non_vacuum_count(StreamRng &rng) const { return 1 + pick(conditional_cdf_, rng.uniform()); }
    std::size_t any_count(StreamRng &rng) const { return pick(full_cdf_, rng.uniform()); }

   private:
    static std::size_t pick(const std::vector<double> &cdf, double u) {
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
            if (u < cdf[i]) return i;
        }
        return cdf.size() - 1;
    }

    double non_vacuum_ = 0;
    double log_vacuum_ = 0;
    std::vector<double> full_cdf_;
    std::vector<double> conditional_cdf_;
};

void simulate_pulse(const ExperimentConfig &c, std::uint64_t pulse, std::size_t pairs, StreamRng &rng,
                    BatchOutput &out) {
    std::size_t clicks = sample_clicks(pairs, c.idler_transmission, c.n_pixels, c.crosstalk, rng);
    ++out.clicks[clicks];
    if (c.herald_selection.accepts(clicks)) {
        out.herald_pulses.push_back(pulse);
    }
    for (std::size_t i = 0; i < pairs; ++i) {
        if (!rng.bernoulli(c.signal_transmission)) continue;
        Channel channel = rng.bernoulli(c.hbt_splitting) ? Channel::kHbtA : Channel::kHbtB;
        if (!rng.bernoulli(c.hbt_efficiency)) continue;
        double u_gate = rng.uniform();
        Picoseconds jitter = 0;
        if (c.jitter_ps > 0) {
            jitter = static_cast<Picoseconds>(std::llround(rng.normal() * static_cast<double>(c.jitter_ps)));
        }
        out.photons.push_back({pulse, u_gate, jitter, channel});
    }
}

void simulate_batch(const ExperimentConfig &c, const PairSampler &sampler, std::uint64_t batch, BatchOutput &out) {
    const std::uint64_t first = batch * kBatchPulses;
    const std::uint64_t last = std::min(first + kBatchPulses, c.n_pulses);
    out.clicks.assign(c.n_pixels + 1, 0);

    StreamRng rng(c.seed, batch, kPulseStream);
    if (c.herald_selection.accepts(0)) {
        // Vacuum pulses can herald, so every pulse needs its own draw.
        for (std::uint64_t p = first; p < last; ++p) {
            simulate_pulse(c, p, sampler.any_count(rng), rng, out);
        }
    } else if (sampler.non_vacuum() > 0) {
        std::uint64_t visited = 0;
        for (std::uint64_t p = first;; ++p) {
            std::uint64_t gap = sampler.vacuum_gap(rng);
            if (gap >= last - p) break;
            p += gap;
            simulate_pulse(c, p, sampler.non_vacuum_count(rng), rng, out);
            ++visited;
            if (p + 1 >= last) break;
        }
        out.clicks[0] += (last - first) - visited;
    } else {
        out.clicks[0] += last - first;
    }

    if (c.dark_rate_hz > 0) {
        StreamRng dark_rng(c.seed, batch, kDarkStream);
        const double rate_per_ps = c.dark_rate_hz * 1e-12;
        const double t0 = static_cast<double>(first) * static_cast<double>(c.rep_period_ps);
        const double span = static_cast<double>(last - first) * static_cast<double>(c.rep_period_ps);
        for (int d = 0; d < 2; ++d) {
            Channel channel = d == 0 ? Channel::kHbtA : Channel::kHbtB;
            double t = 0;
            while (true) {
                t += -std::log(dark_rng.uniform_open_zero()) / rate_per_ps;
                if (t >= span) break;
                out.tags.push_back({channel, static_cast<std::uint64_t>(std::floor(t0 + t))});
                ++out.dark[d];
            }
        }
    }
}

void resolve_gates(const ExperimentConfig &c, const GateTimeline &timeline, BatchOutput &out) {
    const double leakage = c.leakage();
    for (const auto &photon : out.photons) {
        Picoseconds arrival = static_cast<Picoseconds>(photon.pulse) * c.rep_period_ps + c.signal_delay_ps;
        if (photon.u_gate < timeline.transmission(arrival, leakage, c.edge_ramp_ps)) {
            Picoseconds t = std::max<Picoseconds>(0, arrival + photon.jitter);
            out.tags.push_back({photon.channel, static_cast<std::uint64_t>(t)});
        }
    }
    out.photons.clear();
    out.photons.shrink_to_fit();
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

std::vector<Picoseconds> accept_heralds(const ExperimentConfig &c, const std::vector<BatchOutput> &batches,
                                        RunSummary &summary) {
    std::vector<Picoseconds> accepted;
    Picoseconds busy_until = std::numeric_limits<Picoseconds>::min();
    for (const auto &batch : batches) {
        for (std::uint64_t pulse : batch.herald_pulses) {
            ++summary.herald_candidates;
            Picoseconds t = static_cast<Picoseconds>(pulse) * c.rep_period_ps;
            if (c.retrigger == RetriggerMode::kIgnoreWhileOpen) {
                if (t < busy_until) {
                    ++summary.heralds_ignored;
                    continue;
                }
                busy_until = t + c.latency_ps + c.gate_length_ps;
            }
            accepted.push_back(t);
        }
    }
    return accepted;
}

void apply_dead_time(std::vector<TimeTagRecord> &tags, Picoseconds dead_time) {
    if (dead_time <= 0) return;
    std::array<std::uint64_t, kNumChannels> last{};
    std::array<bool, kNumChannels> seen{};
    std::erase_if(tags, [&](const TimeTagRecord &tag) {
        auto ch = static_cast<std::size_t>(tag.channel);
        if (tag.channel == Channel::kHeraldTrigger) return false;
        if (seen[ch] && tag.timestamp_ps < last[ch] + static_cast<std::uint64_t>(dead_time)) return true;
        seen[ch] = true;
        last[ch] = tag.timestamp_ps;
        return false;
    });
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t batch, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32), purpose};
    engine_.seed(seq);
}

double StreamRng::normal() {
    double r = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
}

std::size_t sample_clicks(std::size_t photons, double transmission, std::size_t n_pixels, double crosstalk,
                          StreamRng &rng) {
    std::size_t clicks = 0;
    if (n_pixels <= 64) {
        std::uint64_t fired = 0;
        for (std::size_t i = 0; i < photons; ++i) {
            if (!rng.bernoulli(transmission)) continue;
            auto pixel = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * double(n_pixels)),
                                               n_pixels - 1);
            fired |= std::uint64_t{1} << pixel;
        }
        clicks = static_cast<std::size_t>(std::popcount(fired));
    } else {
        std::vector<bool> fired(n_pixels, false);
        for (std::size_t i = 0; i < photons; ++i) {
            if (!rng.bernoulli(transmission)) continue;
            auto pixel = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * double(n_pixels)),
                                               n_pixels - 1);
            if (!fired[pixel]) {
                fired[pixel] = true;
                ++clicks;
            }
        }
    }
    if (clicks >= 1 && clicks < n_pixels && crosstalk > 0 && rng.bernoulli(crosstalk)) {
        ++clicks;
    }
    return clicks;
}

GateState gate_state(Picoseconds t, std::span<const Picoseconds> herald_times, const ExperimentConfig &config) {
    // All gates share one length, so the latest herald that has already
    // opened its gate by t decides.
    auto it = std::upper_bound(herald_times.begin(), herald_times.end(), t - config.latency_ps);
    if (it == herald_times.begin()) return GateState::kClosed;
    Picoseconds h = *std::prev(it);
    return t < h + config.latency_ps + config.gate_length_ps ? GateState::kOpen : GateState::kClosed;
}

GateTimeline::GateTimeline(std::span<const Picoseconds> herald_times, Picoseconds latency, Picoseconds gate_length) {
    if (gate_length <= 0) return;
    for (Picoseconds h : herald_times) {
        Interval next{h + latency, h + latency + gate_length};
        if (!intervals_.empty() && next.start <= intervals_.back().end) {
            intervals_.back().end = std::max(intervals_.back().end, next.end);
        } else {
            intervals_.push_back(next);
        }
    }
}

const GateTimeline::Interval *GateTimeline::find(Picoseconds t) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](Picoseconds v, const Interval &iv) { return v < iv.start; });
    if (it == intervals_.begin()) return nullptr;
    const Interval &iv = *std::prev(it);
    return t < iv.end ? &iv : nullptr;
}

bool GateTimeline::is_open(Picoseconds t) const { return find(t) != nullptr; }

double GateTimeline::transmission(Picoseconds t, double leakage, Picoseconds edge_ramp) const {
    const Interval *iv = find(t);
    if (iv == nullptr) return leakage;
    if (edge_ramp <= 0) return 1.0;
    double ramp = static_cast<double>(edge_ramp);
    double rise = static_cast<double>(t - iv->start) / ramp;
    double fall = static_cast<double>(iv->end - t) / ramp;
    double f = std::min({1.0, rise, fall});
    return leakage + (1.0 - leakage) * f;
}

double modulator_transmission(double voltage, double v_pi, double visibility, double bias_phase) {
    if (!(visibility >= 0 && visibility <= 1)) {
        throw ParameterError("visibility must lie in [0, 1]");
    }
    if (!(v_pi > 0)) {
        throw ParameterError("v_pi must be positive");
    }
    return (1.0 - visibility * std::cos(std::numbers::pi * voltage / v_pi + bias_phase)) / (1.0 + visibility);
}

double visibility_for_extinction(double extinction_db) {
    if (!(extinction_db >= 0)) {
        throw ParameterError("extinction must be >= 0 dB");
    }
    if (std::isinf(extinction_db)) return 1.0;
    double ratio = std::pow(10.0, -extinction_db / 10.0);
    return (1.0 - ratio) / (1.0 + ratio);
}

std::string RunSummary::to_text() const {
    std::ostringstream out;
    out << "[run]\n"
        << "format_version = 1\n"
        << "pulses = " << pulses << "\n"
        << "seed = " << seed << "\n"
        << "duration_ps = " << duration_ps << "\n\n"
        << "[counts]\n"
        << "herald = " << channel_counts[0] << "\n"
        << "hbt_a = " << channel_counts[1] << "\n"
        << "hbt_b = " << channel_counts[2] << "\n"
        << "herald_candidates = " << herald_candidates << "\n"
        << "heralds_ignored = " << heralds_ignored << "\n"
        << "dark_hbt_a = " << dark_counts[0] << "\n"
        << "dark_hbt_b = " << dark_counts[1] << "\n\n"
        << "[click_outcomes]\n";
    for (std::size_t k = 0; k < click_outcomes.size(); ++k) {
        out << "k" << k << " = " << click_outcomes[k] << "\n";
    }
    // Config echo, with its sections namespaced under "config.".
    std::istringstream echo(config_echo);
    std::string line;
    while (std::getline(echo, line)) {
        if (line.starts_with("[")) {
            out << "\n[config." << line.substr(1) << "\n";
        } else if (!line.empty()) {
            out << line << "\n";
        }
    }
    return out.str();
}

RunResult run(const ExperimentConfig &config, unsigned threads) {
    config.validate();
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    PairSampler sampler(config.source_family, config.mean_pairs_per_pulse);
    const std::size_t n_batches = static_cast<std::size_t>((config.n_pulses + kBatchPulses - 1) / kBatchPulses);
    std::vector<BatchOutput> batches(n_batches);

    parallel_for(n_batches, threads, [&](std::size_t b) { simulate_batch(config, sampler, b, batches[b]); });

    RunSummary summary;
    summary.pulses = config.n_pulses;
    summary.seed = config.seed;
    summary.duration_ps = config.duration_ps();
    summary.click_outcomes.assign(config.n_pixels + 1, 0);
    summary.config_echo = to_ini(config);

    // Sequential stitch: retrigger semantics need heralds in global order.
    std::vector<Picoseconds> heralds = accept_heralds(config, batches, summary);
    GateTimeline timeline(heralds, config.latency_ps, config.gate_length_ps);

    parallel_for(n_batches, threads, [&](std::size_t b) { resolve_gates(config, timeline, batches[b]); });

    std::size_t total = heralds.size();
    for (const auto &batch : batches) total += batch.tags.size();
    TagStream stream;
    stream.duration_ps = config.duration_ps();
    stream.tags.reserve(total);
    for (Picoseconds h : heralds) {
        stream.tags.push_back({Channel::kHeraldTrigger, static_cast<std::uint64_t>(h)});
    }
    for (auto &batch : batches) {
        stream.tags.insert(stream.tags.end(), batch.tags.begin(), batch.tags.end());
        for (std::size_t k = 0; k < batch.clicks.size(); ++k) summary.click_outcomes[k] += batch.clicks[k];
        summary.dark_counts[0] += batch.dark[0];
        summary.dark_counts[1] += batch.dark[1];
        batch = BatchOutput{};
    }
    std::sort(stream.tags.begin(), stream.tags.end(), tag_order);
    apply_dead_time(stream.tags, config.dead_time_ps);
    summary.channel_counts = stream.channel_counts();
    return {std::move(stream), std::move(summary)};
}

}  // namespace ffsim
