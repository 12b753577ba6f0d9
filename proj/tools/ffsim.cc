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

// Command-line front end: matrix, sweep, simulate, analyze, thresholds.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ffsim/amplitude_discriminator.h"
#include "ffsim/coincidence_analysis.h"
#include "ffsim/detector_model.h"
#include "ffsim/errors.h"
#include "ffsim/event_sim.h"
#include "ffsim/experiment_config.h"
#include "ffsim/feedforward_analytic.h"
#include "ffsim/manifest.h"
#include "ffsim/photon_stats.h"
#include "ffsim/time_tags.h"

namespace fs = std::filesystem;
using namespace ffsim;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 1;

struct DetectorFlags {
    double transmission = 0.7;
    std::size_t pixels = 4;
    double crosstalk = 0.025;
    std::size_t n_max = 0;  // 0 = choose automatically where allowed

    void add_to(CLI::App *app, std::size_t default_n_max) {
        n_max = default_n_max;
        app->add_option("--transmission", transmission, "Source-to-detector transmission T")->capture_default_str();
        app->add_option("--pixels", pixels, "Number of detector pixels N")->capture_default_str();
        app->add_option("--crosstalk", crosstalk, "Click-level crosstalk probability")->capture_default_str();
        app->add_option("--nmax", n_max, "Incident photon-number cutoff (0 = automatic)")->capture_default_str();
    }
};

/// Resolves a relative output path against FFSIM_OUTPUT_DIR when set.
fs::path output_path(const std::string &path) {
    fs::path p(path);
    if (const char *dir = std::getenv("FFSIM_OUTPUT_DIR"); dir != nullptr && *dir && p.is_relative()) {
        p = fs::path(dir) / p;
    }
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

std::ofstream open_out(const fs::path &path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return out;
}

/// Writes to the named file, or stdout for "" / "-".
template <typename Fn>
void emit(const std::string &target, Fn write) {
    if (target.empty() || target == "-") {
        write(std::cout);
        return;
    }
    auto out = open_out(output_path(target));
    write(out);
    if (!out) throw ConfigError("failed writing '" + target + "'");
}

unsigned thread_count(unsigned flag) {
    if (flag != 0) return flag;
    if (const char *env = std::getenv("FFSIM_THREADS"); env != nullptr && *env) {
        return static_cast<unsigned>(std::stoul(env));
    }
    return 0;
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void run_matrix(const DetectorFlags &det, const std::string &out) {
    if (det.n_max == 0) throw ParameterError("--nmax must be >= 1");
    auto m = detection_matrix(det.transmission, det.pixels, det.crosstalk, det.n_max);
    emit(out, [&](std::ostream &os) { write_matrix_csv(os, m.entries, 6); });
}

struct SweepFlags {
    std::string selection = "1";
    std::string family = "poissonian";
    double mu_min = 1e-4;
    double mu_max = 1.0;
    std::size_t points = 30;
    std::string out;
};

void run_sweep(DetectorFlags det, const SweepFlags &f) {
    auto family = parse_source_family(f.family);
    auto means = log_grid(f.mu_min, f.mu_max, f.points);
    if (det.n_max == 0) det.n_max = std::max<std::size_t>(required_n_max(family, f.mu_max), det.pixels);
    auto sel = HeraldSelection::parse(f.selection, det.pixels);
    auto matrix = detection_matrix(det.transmission, det.pixels, det.crosstalk, det.n_max);
    auto points = g2_sweep(matrix, sel, means, family);
    emit(f.out, [&](std::ostream &os) { write_sweep_csv(os, points, sel, family); });
}

struct SimulateFlags {
    std::string config;
    std::vector<std::string> overrides;
    std::uint64_t pulses = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out = "run";
    std::string format = "bin";
    unsigned threads = 0;
};

void run_simulate(const SimulateFlags &f, const std::string &command_line) {
    RunManifest manifest;
    manifest.start_time = utc_now_iso8601();
    manifest.command = command_line;

    ExperimentConfig config = f.config.empty() ? ExperimentConfig{} : load_config_file(f.config);
    for (const auto &o : f.overrides) apply_override(config, o);
    if (f.pulses != 0) config.n_pulses = f.pulses;
    if (f.seed_set) config.seed = f.seed;
    config.validate();

    RunResult result = run(config, thread_count(f.threads));

    fs::path prefix = output_path(f.out);
    fs::path tags_path = prefix;
    tags_path += (f.format == "csv") ? ".tags.csv" : ".ttag";
    fs::path summary_path = prefix;
    summary_path += ".summary.ini";
    fs::path manifest_path = prefix;
    manifest_path += ".manifest.json";

    save_tags(tags_path, result.stream.tags);
    {
        auto out = open_out(summary_path);
        out << result.summary.to_text();
    }
    manifest.seed = config.seed;
    manifest.config_echo = to_ini(config);
    manifest.add_output(tags_path);
    manifest.add_output(summary_path);
    if (!verify_manifest(manifest).empty()) {
        throw ConfigError("output digests changed while writing the manifest");
    }
    manifest.end_time = utc_now_iso8601();
    {
        auto out = open_out(manifest_path);
        out << manifest.to_json();
    }
    const auto &c = result.summary.channel_counts;
    std::cout << "pulses " << config.n_pulses << ", heralds " << c[0] << ", hbt_a " << c[1] << ", hbt_b " << c[2]
              << "\nwrote " << tags_path.string() << ", " << summary_path.string() << ", "
              << manifest_path.string() << "\n";
}

struct AnalyzeFlags {
    std::string tags;
    std::string config;
    std::string bin = "250ps";
    std::string range = "100ns";
    std::string rep_period;
    std::string halfwidth = "1ns";
    std::string duration;
    std::string out = "analysis";
    bool isolated = false;
};

void run_analyze(const AnalyzeFlags &f) {
    ExperimentConfig config = f.config.empty() ? ExperimentConfig{} : load_config_file(f.config);
    if (!f.rep_period.empty()) config.rep_period_ps = parse_duration(f.rep_period);
    const Picoseconds bin = parse_duration(f.bin);
    const Picoseconds range = parse_duration(f.range);
    const Picoseconds halfwidth = parse_duration(f.halfwidth);

    TagStream stream;
    stream.tags = load_tags(f.tags);
    std::sort(stream.tags.begin(), stream.tags.end(), tag_order);
    if (!f.duration.empty()) {
        stream.duration_ps = static_cast<std::uint64_t>(parse_duration(f.duration));
    } else if (!f.config.empty()) {
        stream.duration_ps = config.duration_ps();
    } else if (!stream.tags.empty()) {
        auto rep = static_cast<std::uint64_t>(config.rep_period_ps);
        stream.duration_ps = (stream.tags.back().timestamp_ps / rep + 1) * rep;
    }
    if (f.config.empty() && stream.duration_ps > 0) {
        config.n_pulses = stream.duration_ps / static_cast<std::uint64_t>(config.rep_period_ps);
    }

    auto write_pair = [&](const std::string &name, const CoincidenceHistogram &hist) {
        emit(f.out + "." + name + "_hist.csv", [&](std::ostream &os) { write_histogram_csv(os, hist); });
        if (hist.singles_a == 0 || hist.singles_b == 0 || hist.duration_ps == 0) {
            std::cout << name << ": no singles on one side, peak table skipped\n";
            return;
        }
        auto peaks = g2_tau(hist, config.rep_period_ps, config.rep_rate_hz(), halfwidth);
        emit(f.out + "." + name + "_peaks.csv", [&](std::ostream &os) { write_peaks_csv(os, peaks); });
        std::cout << name << ": " << hist.total() << " coincidences in range, " << peaks.size() << " peaks\n";
    };

    write_pair("hbt", correlate(stream, Channel::kHbtA, Channel::kHbtB, bin, range));
    if (f.isolated) {
        auto kept = isolate_heralds(stream, isolation_guard(config, range));
        std::cout << "isolated heralds: " << kept.channel_counts()[0] << " of " << stream.channel_counts()[0] << "\n";
        write_pair("herald", correlate(kept, Channel::kHeraldTrigger, {Channel::kHbtA, Channel::kHbtB}, bin, range));
    } else {
        write_pair("herald", correlate(stream, Channel::kHeraldTrigger, {Channel::kHbtA, Channel::kHbtB}, bin, range));
    }

    if (stream.channel_counts()[0] > 0) {
        auto rates = herald_conditioned_rates(stream, config);
        auto g2 = heralded_g2(stream, config, 0, halfwidth);
        emit(f.out + ".herald_summary.txt", [&](std::ostream &os) {
            os << "[regions]\n"
               << "open_rate_hz = " << rates.open_rate << "\n"
               << "closed_rate_hz = " << rates.closed_rate << "\n"
               << "correlated_rate_hz = " << rates.correlated_rate << "\n"
               << "open_counts = " << rates.open_counts << "\n"
               << "closed_counts = " << rates.closed_counts << "\n"
               << "correlated_counts = " << rates.correlated_counts << "\n\n"
               << "[heralded_g2]\n"
               << "heralds = " << g2[0].heralds << "\n"
               << "singles_a = " << g2[0].singles_a << "\n"
               << "singles_b = " << g2[0].singles_b << "\n"
               << "coincidences = " << g2[0].coincidences << "\n"
               << "g2_zero = " << g2[0].g2 << "\n"
               << "sigma = " << g2[0].sigma << "\n";
        });
        std::cout << "heralded g2(0) = " << g2[0].g2 << " +- " << g2[0].sigma << "\n";
    }
}

struct ThresholdFlags {
    double mu = 1.0;
    std::string family = "poissonian";
    double unit = 0.1;
    double noise = -1;  // < 0 means 5% of unit
    double baseline = 0.0;
    double rep_rate = 80e6;
    double low_min = -0.05, low_max = 0.5;
    std::size_t low_steps = 111;
    double high_min = 0.0, high_max = 0.5;
    std::size_t high_steps = 101;
    bool with_inf = true;
    std::string out;
};

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
    if (steps < 2 || !(hi > lo)) throw ParameterError("threshold grids need hi > lo and at least 2 steps");
    std::vector<double> g(steps);
    for (std::size_t i = 0; i < steps; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / double(steps - 1);
    return g;
}

void run_thresholds(DetectorFlags det, const ThresholdFlags &f) {
    auto family = parse_source_family(f.family);
    if (det.n_max == 0) det.n_max = std::max<std::size_t>(required_n_max(family, f.mu), det.pixels);
    auto source = source_distribution(family, f.mu, det.n_max);
    auto matrix = detection_matrix(det.transmission, det.pixels, det.crosstalk, det.n_max);
    AmplitudeModel model{f.unit, f.noise < 0 ? 0.05 * f.unit : f.noise, f.baseline};
    auto low = linear_grid(f.low_min, f.low_max, f.low_steps);
    auto high = linear_grid(f.high_min, f.high_max, f.high_steps);
    if (f.with_inf) high.push_back(std::numeric_limits<double>::infinity());
    auto surface = threshold_sweep(source, matrix, model, f.rep_rate, low, high);
    emit(f.out, [&](std::ostream &os) { write_surface_csv(os, surface); });
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ffsim: photon-number-conditioned feedforward simulator and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    DetectorFlags matrix_det;
    std::string matrix_out;
    auto *matrix = app.add_subcommand("matrix", "Write the detection matrix p(n, n') as CSV");
    matrix_det.add_to(matrix, 10);
    matrix->add_option("--out", matrix_out, "Output CSV (default stdout)");

    DetectorFlags sweep_det;
    SweepFlags sweep_flags;
    auto *sweep = app.add_subcommand("sweep", "Heralded g2(0) versus mean photon number");
    sweep_det.add_to(sweep, 0);
    sweep->add_option("--selection", sweep_flags.selection, "Accepted click counts: 1 | 2 | 1,2 | >=2 | all")
        ->capture_default_str();
    sweep->add_option("--family", sweep_flags.family, "poissonian | thermal")->capture_default_str();
    sweep->add_option("--mu-min", sweep_flags.mu_min)->capture_default_str();
    sweep->add_option("--mu-max", sweep_flags.mu_max)->capture_default_str();
    sweep->add_option("--points", sweep_flags.points)->capture_default_str();
    sweep->add_option("--out", sweep_flags.out, "Output CSV (default stdout)");

    SimulateFlags sim_flags;
    auto *simulate = app.add_subcommand("simulate", "Run the time-tag Monte Carlo");
    simulate->add_option("--config", sim_flags.config, "INI experiment config")->check(CLI::ExistingFile);
    simulate->add_option("--set", sim_flags.overrides, "Override, e.g. --set source.mean_pairs_per_pulse=0.1");
    simulate->add_option("--pulses", sim_flags.pulses, "Number of pulses (overrides config)");
    simulate->add_option("--seed", sim_flags.seed, "RNG seed (overrides config)");
    simulate->add_option("--out", sim_flags.out, "Output prefix")->capture_default_str();
    simulate->add_option("--format", sim_flags.format, "Tag file format")
        ->check(CLI::IsMember({"bin", "csv"}))
        ->capture_default_str();
    simulate->add_option("--threads", sim_flags.threads, "Worker threads (0 = all cores)");

    AnalyzeFlags an_flags;
    auto *analyze = app.add_subcommand("analyze", "Coincidence histograms, peak tables and g2 from a tag file");
    analyze->add_option("--tags", an_flags.tags, "Tag file (.ttag or .csv)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--config", an_flags.config, "Config the tags were generated with")
        ->check(CLI::ExistingFile);
    analyze->add_option("--bin", an_flags.bin)->capture_default_str();
    analyze->add_option("--range", an_flags.range)->capture_default_str();
    analyze->add_option("--rep-period", an_flags.rep_period, "Repetition period (default from config, 12.5ns)");
    analyze->add_option("--halfwidth", an_flags.halfwidth, "Peak integration half-width")->capture_default_str();
    analyze->add_option("--duration", an_flags.duration, "Acquisition duration");
    analyze->add_option("--out", an_flags.out, "Output prefix")->capture_default_str();
    analyze->add_flag("--isolated", an_flags.isolated,
                      "Herald histogram only from heralds with no other gate reaching the range");

    DetectorFlags th_det;
    ThresholdFlags th_flags;
    auto *thresholds = app.add_subcommand("thresholds", "Discriminator count-rate surface over threshold pairs");
    th_det.add_to(thresholds, 0);
    thresholds->add_option("--mu", th_flags.mu, "Mean photon number of the probe light")->capture_default_str();
    thresholds->add_option("--family", th_flags.family)->capture_default_str();
    thresholds->add_option("--unit", th_flags.unit, "Pulse height per fired pixel [V]")->capture_default_str();
    thresholds->add_option("--noise", th_flags.noise, "Gaussian noise sigma [V] (default 5% of unit)");
    thresholds->add_option("--baseline", th_flags.baseline)->capture_default_str();
    thresholds->add_option("--rep-rate", th_flags.rep_rate, "Pulse repetition rate [Hz]")->capture_default_str();
    thresholds->add_option("--low-min", th_flags.low_min)->capture_default_str();
    thresholds->add_option("--low-max", th_flags.low_max)->capture_default_str();
    thresholds->add_option("--low-steps", th_flags.low_steps)->capture_default_str();
    thresholds->add_option("--high-min", th_flags.high_min)->capture_default_str();
    thresholds->add_option("--high-max", th_flags.high_max)->capture_default_str();
    thresholds->add_option("--high-steps", th_flags.high_steps)->capture_default_str();
    thresholds->add_flag("!--no-inf", th_flags.with_inf, "Omit the open-ended (high = inf) column");
    thresholds->add_option("--out", th_flags.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }
    sim_flags.seed_set = simulate->count("--seed") > 0;

    std::string command_line;
    for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

    try {
        if (*matrix) run_matrix(matrix_det, matrix_out);
        if (*sweep) run_sweep(sweep_det, sweep_flags);
        if (*simulate) run_simulate(sim_flags, command_line);
        if (*analyze) run_analyze(an_flags);
        if (*thresholds) run_thresholds(th_det, th_flags);
    } catch (const ParameterError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TruncationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
