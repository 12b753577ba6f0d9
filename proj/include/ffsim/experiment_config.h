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

#ifndef FFSIM_EXPERIMENT_CONFIG_H
#define FFSIM_EXPERIMENT_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ffsim/feedforward_analytic.h"
#include "ffsim/photon_stats.h"
#include "ffsim/time_tags.h"

namespace ffsim {

/// What the trigger does with a herald that arrives while it is still busy
/// with an earlier one.
enum class RetriggerMode {
    kExtend,           // every herald opens its own gate; overlapping gates merge
    kIgnoreWhileOpen,  // heralds within [h, h + latency + gate) of the last accepted herald h are dropped
};

std::string_view to_string(RetriggerMode mode);
RetriggerMode parse_retrigger_mode(std::string_view text);

/// Every physical and run parameter of a feedforward experiment.
///
/// Times are integer picoseconds. Signal photons of pulse p reach the
/// modulator (and, with no further delay, the HBT detectors) at
/// p * rep_period + signal_delay; the herald tag is stamped at p * rep_period
/// and opens the gate over [t + latency, t + latency + gate_length).
struct ExperimentConfig {
    // [source]
    Picoseconds rep_period_ps = 12'500;
    double mean_pairs_per_pulse = 0.0075;
    SourceFamily source_family = SourceFamily::kPoissonian;

    // [idler]
    double idler_transmission = 0.7;
    std::size_t n_pixels = 4;
    double crosstalk = 0.025;
    HeraldSelection herald_selection = HeraldSelection::at_least(1, 4);

    // [modulator]
    Picoseconds latency_ps = 23'000;
    Picoseconds gate_length_ps = 80'000;
    Picoseconds signal_delay_ps = 25'000;
    double extinction_db = 10.2;  // +inf means no leakage
    Picoseconds edge_ramp_ps = 0;  // linear rise/fall inside the gate; 0 = ideal edges
    RetriggerMode retrigger = RetriggerMode::kExtend;

    // [signal]
    double signal_transmission = 0.5;
    double hbt_splitting = 0.5;   // probability of routing to HBT A
    double hbt_efficiency = 0.9;  // per detector
    double dark_rate_hz = 100.0;  // per HBT detector
    Picoseconds dead_time_ps = 0;
    Picoseconds jitter_ps = 0;  // Gaussian sigma on HBT tags

    // [run]
    std::uint64_t n_pulses = 10'000'000;
    std::uint64_t seed = 1;

    double rep_rate_hz() const { return 1e12 / static_cast<double>(rep_period_ps); }
    /// Modulator transmission outside an open gate, 10^(-extinction_db / 10).
    double leakage() const;
    std::uint64_t duration_ps() const { return n_pulses * static_cast<std::uint64_t>(rep_period_ps); }

    /// Throws ConfigError naming the first invalid field, including a run
    /// whose last timestamp would overflow 63 bits.
    void validate() const;
};

/// Parses "23ns", "12.5 ns", "12500ps", "1us" or a bare number (ps) to integer ps.
Picoseconds parse_duration(std::string_view text);

/// Reads an INI document with sections [source], [idler], [modulator],
/// [signal] and [run] on top of the defaults. Unknown keys are errors.
ExperimentConfig load_config(std::istream &in);
ExperimentConfig load_config_file(const std::filesystem::path &path);

/// Applies one "section.key=value" override.
void apply_override(ExperimentConfig &config, std::string_view assignment);

/// Canonical INI text of the config; load_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig &config);

}  // namespace ffsim

#endif
