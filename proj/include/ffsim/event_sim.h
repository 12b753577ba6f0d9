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

#ifndef FFSIM_EVENT_SIM_H
#define FFSIM_EVENT_SIM_H

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ffsim/experiment_config.h"
#include "ffsim/time_tags.h"

namespace ffsim {

/// Random stream for one (seed, batch, purpose) key. Uniform doubles are
/// built from the top 53 bits of mt19937_64, so streams are identical on
/// every standard library.
class StreamRng {
   public:
    StreamRng(std::uint64_t seed, std::uint64_t batch, std::uint32_t purpose);

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform in (0, 1].
    double uniform_open_zero() { return 1.0 - uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal via Box-Muller.
    double normal();

   private:
    std::mt19937_64 engine_;
};

/// Click count for `photons` incident on the idler detector: binomial loss,
/// uniform pixel assignment, then click-level crosstalk (k -> k+1 with
/// probability crosstalk for 1 <= k < n_pixels).
std::size_t sample_clicks(std::size_t photons, double transmission, std::size_t n_pixels, double crosstalk,
                          StreamRng &rng);

enum class GateState { kOpen, kClosed };

/// Open iff some herald h satisfies h + latency <= t < h + latency + gate_length.
GateState gate_state(Picoseconds t, std::span<const Picoseconds> herald_times, const ExperimentConfig &config);

/// Union of the gate intervals opened by a sorted list of accepted heralds.
class GateTimeline {
   public:
    struct Interval {
        Picoseconds start;
        Picoseconds end;  // exclusive
    };

    GateTimeline(std::span<const Picoseconds> herald_times, Picoseconds latency, Picoseconds gate_length);

    bool is_open(Picoseconds t) const;
    /// Modulator transmission at t: 1 inside the gate, `leakage` outside,
    /// linear over `edge_ramp` at the inner edges of each merged interval.
    double transmission(Picoseconds t, double leakage, Picoseconds edge_ramp) const;
    const std::vector<Interval> &intervals() const { return intervals_; }

   private:
    const Interval *find(Picoseconds t) const;
    std::vector<Interval> intervals_;
};

/// Interferometric transfer (1 - visibility cos(pi V / v_pi + bias_phase)) / (1 + visibility),
/// normalized to a maximum of 1. The min/max ratio is (1 - v) / (1 + v).
double modulator_transmission(double voltage, double v_pi, double visibility, double bias_phase);

/// Visibility whose min/max transmission ratio is 10^(-extinction_db / 10).
double visibility_for_extinction(double extinction_db);

struct RunSummary {
    std::uint64_t pulses = 0;
    std::uint64_t seed = 0;
    std::uint64_t duration_ps = 0;
    std::uint64_t herald_candidates = 0;  // pulses whose click count passed the selection
    std::uint64_t heralds_ignored = 0;    // dropped by RetriggerMode::kIgnoreWhileOpen
    std::array<std::uint64_t, kNumChannels> channel_counts{};
    std::array<std::uint64_t, 2> dark_counts{};  // generated on HBT A, HBT B (before dead time)
    std::vector<std::uint64_t> click_outcomes;   // pulses per idler click count 0..n_pixels
    std::string config_echo;

    /// Sectioned key = value text; contains nothing run-to-run variable.
    std::string to_text() const;
};

struct RunResult {
    TagStream stream;
    RunSummary summary;
};

/// Pulses simulated per RNG batch. Fixed so that output does not depend on
/// the worker count.
inline constexpr std::uint64_t kBatchPulses = std::uint64_t{1} << 22;

/// Simulates config.n_pulses pulses with `threads` workers (0 = hardware
/// concurrency). Output is bit-identical for any thread count.
RunResult run(const ExperimentConfig &config, unsigned threads = 0);

}  // namespace ffsim

#endif
