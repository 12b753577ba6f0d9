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

#include "ffsim/experiment_config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ffsim/errors.h"

namespace ffsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    std::string copy(text);
    try {
        std::size_t used = 0;
        double v = std::stod(copy, &used);
        if (used == copy.size()) return v;
    } catch (const std::exception &) {
    }
    throw ConfigError("bad number '" + copy + "' for " + std::string(key));
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) {
        return v;
    }
    // Accept scientific notation for large counts such as 1e8.
    double d = parse_real(key, text);
    if (d >= 0 && d < 1.8e19 && std::floor(d) == d) {
        return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("bad count '" + std::string(text) + "' for " + std::string(key));
}

Picoseconds duration_field(std::string_view key, std::string_view text) {
    try {
        return parse_duration(text);
    } catch (const ConfigError &e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

void set_field(ExperimentConfig &c, std::string &selection_text, std::string_view section, std::string_view key,
               std::string_view value) {
    std::string name = std::string(section) + "." + std::string(key);
    if (section == "source") {
        if (key == "rep_period") return void(c.rep_period_ps = duration_field(name, value));
        if (key == "mean_pairs_per_pulse") return void(c.mean_pairs_per_pulse = parse_real(name, value));
        if (key == "family") {
            try {
                c.source_family = parse_source_family(trim(value));
            } catch (const ParameterError &e) {
                throw ConfigError(e.what());
            }
            return;
        }
    } else if (section == "idler") {
        if (key == "transmission") return void(c.idler_transmission = parse_real(name, value));
        if (key == "pixels") return void(c.n_pixels = parse_unsigned(name, value));
        if (key == "crosstalk") return void(c.crosstalk = parse_real(name, value));
        if (key == "selection") return void(selection_text = std::string(trim(value)));
    } else if (section == "modulator") {
        if (key == "latency") return void(c.latency_ps = duration_field(name, value));
        if (key == "gate_length") return void(c.gate_length_ps = duration_field(name, value));
        if (key == "signal_delay") return void(c.signal_delay_ps = duration_field(name, value));
        if (key == "extinction_db") {
            auto v = trim(value);
            c.extinction_db = (v == "inf") ? std::numeric_limits<double>::infinity() : parse_real(name, v);
            return;
        }
        if (key == "edge_ramp") return void(c.edge_ramp_ps = duration_field(name, value));
        if (key == "retrigger") {
            try {
                c.retrigger = parse_retrigger_mode(trim(value));
            } catch (const ParameterError &e) {
                throw ConfigError(e.what());
            }
            return;
        }
    } else if (section == "signal") {
        if (key == "transmission") return void(c.signal_transmission = parse_real(name, value));
        if (key == "hbt_splitting") return void(c.hbt_splitting = parse_real(name, value));
        if (key == "hbt_efficiency") return void(c.hbt_efficiency = parse_real(name, value));
        if (key == "dark_rate") return void(c.dark_rate_hz = parse_real(name, value));
        if (key == "dead_time") return void(c.dead_time_ps = duration_field(name, value));
        if (key == "jitter") return void(c.jitter_ps = duration_field(name, value));
    } else if (section == "run") {
        if (key == "pulses") return void(c.n_pulses = parse_unsigned(name, value));
        if (key == "seed") return void(c.seed = parse_unsigned(name, value));
    }
    throw ConfigError("unknown config key '" + name + "'");
}

void resolve_selection(ExperimentConfig &c, const std::string &selection_text) {
    if (selection_text.empty()) {
        return;
    }
    try {
        c.herald_selection = HeraldSelection::parse(selection_text, c.n_pixels);
    } catch (const ParameterError &e) {
        throw ConfigError(std::string("idler.selection: ") + e.what());
    }
}

std::string selection_text_of(const HeraldSelection &sel) {
    const auto &acc = sel.accepted_clicks();
    std::ostringstream out;
    for (std::size_t i = 0; i < acc.size(); ++i) out << (i ? "," : "") << acc[i];
    return out.str();
}

}  // namespace

std::string_view to_string(RetriggerMode mode) {
    return mode == RetriggerMode::kExtend ? "extend" : "ignore";
}

RetriggerMode parse_retrigger_mode(std::string_view text) {
    if (text == "extend") return RetriggerMode::kExtend;
    if (text == "ignore") return RetriggerMode::kIgnoreWhileOpen;
    throw ParameterError("unknown retrigger mode '" + std::string(text) + "' (expected extend|ignore)");
}

double ExperimentConfig::leakage() const {
    if (std::isinf(extinction_db)) return 0.0;
    return std::pow(10.0, -extinction_db / 10.0);
}

void ExperimentConfig::validate() const {
    auto prob = [](double v, const char *name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            std::ostringstream msg;
            msg << name << " must lie in [0, 1], got " << v;
            throw ConfigError(msg.str());
        }
    };
    if (rep_period_ps <= 0) throw ConfigError("source.rep_period must be positive");
    if (!std::isfinite(mean_pairs_per_pulse) || mean_pairs_per_pulse < 0) {
        throw ConfigError("source.mean_pairs_per_pulse must be finite and >= 0");
    }
    prob(idler_transmission, "idler.transmission");
    if (n_pixels == 0) throw ConfigError("idler.pixels must be >= 1");
    if (!(crosstalk >= 0 && crosstalk < 1)) throw ConfigError("idler.crosstalk must lie in [0, 1)");
    if (herald_selection.max_accepted() > n_pixels) {
        throw ConfigError("idler.selection accepts more clicks than idler.pixels");
    }
    if (latency_ps < 0) throw ConfigError("modulator.latency must be >= 0");
    if (gate_length_ps < 0) throw ConfigError("modulator.gate_length must be >= 0");
    if (signal_delay_ps < 0) throw ConfigError("modulator.signal_delay must be >= 0");
    if (!(extinction_db >= 0)) throw ConfigError("modulator.extinction_db must be >= 0");
    if (edge_ramp_ps < 0) throw ConfigError("modulator.edge_ramp must be >= 0");
    prob(signal_transmission, "signal.transmission");
    prob(hbt_splitting, "signal.hbt_splitting");
    prob(hbt_efficiency, "signal.hbt_efficiency");
    if (!(dark_rate_hz >= 0) || !std::isfinite(dark_rate_hz)) throw ConfigError("signal.dark_rate must be >= 0");
    if (dead_time_ps < 0) throw ConfigError("signal.dead_time must be >= 0");
    if (jitter_ps < 0) throw ConfigError("signal.jitter must be >= 0");

    // The last tag lands near n_pulses * rep_period + signal_delay, plus a
    // generous jitter allowance; all of it must fit a signed 64-bit count.
    constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<Picoseconds>::max());
    auto margin = static_cast<std::uint64_t>(signal_delay_ps) + 16 * static_cast<std::uint64_t>(jitter_ps) +
                  static_cast<std::uint64_t>(latency_ps) + static_cast<std::uint64_t>(gate_length_ps);
    if (margin >= kMax || n_pulses > (kMax - margin) / static_cast<std::uint64_t>(rep_period_ps)) {
        throw ConfigError("run.pulses * source.rep_period overflows the 64-bit picosecond timestamp range");
    }
}

Picoseconds parse_duration(std::string_view text) {
    text = trim(text);
    double scale = 1.0;
    std::string_view number = text;
    struct Unit {
        std::string_view suffix;
        double scale;
    };
    for (Unit unit : {Unit{"ps", 1.0}, Unit{"ns", 1e3}, Unit{"us", 1e6}, Unit{"ms", 1e9}, Unit{"s", 1e12}}) {
        if (text.ends_with(unit.suffix)) {
            scale = unit.scale;
            number = trim(text.substr(0, text.size() - unit.suffix.size()));
            break;
        }
    }
    double value = 0;
    try {
        std::string copy(number);
        std::size_t used = 0;
        value = std::stod(copy, &used);
        if (used != copy.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
        throw ConfigError("bad duration '" + std::string(text) + "'");
    }
    double ps = value * scale;
    if (!std::isfinite(ps) || std::abs(ps) > 9.2e18) {
        throw ConfigError("duration '" + std::string(text) + "' out of range");
    }
    return static_cast<Picoseconds>(std::llround(ps));
}

ExperimentConfig load_config(std::istream &in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig config;
    std::string selection_text;
    for (const auto &[section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config key '" + section + "' must live inside a section");
        }
        for (const auto &[key, value] : body) {
            set_field(config, selection_text, section, key, value.data());
        }
    }
    resolve_selection(config, selection_text);
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    return load_config(in);
}

void apply_override(ExperimentConfig &config, std::string_view assignment) {
    auto eq = assignment.find('=');
    auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
    }
    auto section = trim(assignment.substr(0, dot));
    auto key = trim(assignment.substr(dot + 1, eq - dot - 1));
    auto value = assignment.substr(eq + 1);
    std::string selection_text;
    set_field(config, selection_text, section, key, value);
    if (!selection_text.empty()) {
        resolve_selection(config, selection_text);
    } else if (section == "idler" && key == "pixels") {
        // Keep the selection consistent with a changed pixel count.
        resolve_selection(config, selection_text_of(config.herald_selection));
    }
}

std::string to_ini(const ExperimentConfig &c) {
    std::ostringstream out;
    out.precision(17);
    out << "[source]\n"
        << "rep_period = " << c.rep_period_ps << "ps\n"
        << "mean_pairs_per_pulse = " << c.mean_pairs_per_pulse << "\n"
        << "family = " << to_string(c.source_family) << "\n\n"
        << "[idler]\n"
        << "transmission = " << c.idler_transmission << "\n"
        << "pixels = " << c.n_pixels << "\n"
        << "crosstalk = " << c.crosstalk << "\n"
        << "selection = " << selection_text_of(c.herald_selection) << "\n\n"
        << "[modulator]\n"
        << "latency = " << c.latency_ps << "ps\n"
        << "gate_length = " << c.gate_length_ps << "ps\n"
        << "signal_delay = " << c.signal_delay_ps << "ps\n"
        << "extinction_db = ";
    if (std::isinf(c.extinction_db)) {
        out << "inf\n";
    } else {
        out << c.extinction_db << "\n";
    }
    out << "edge_ramp = " << c.edge_ramp_ps << "ps\n"
        << "retrigger = " << to_string(c.retrigger) << "\n\n"
        << "[signal]\n"
        << "transmission = " << c.signal_transmission << "\n"
        << "hbt_splitting = " << c.hbt_splitting << "\n"
        << "hbt_efficiency = " << c.hbt_efficiency << "\n"
        << "dark_rate = " << c.dark_rate_hz << "\n"
        << "dead_time = " << c.dead_time_ps << "ps\n"
        << "jitter = " << c.jitter_ps << "ps\n\n"
        << "[run]\n"
        << "pulses = " << c.n_pulses << "\n"
        << "seed = " << c.seed << "\n";
    return out.str();
}

}  // namespace ffsim
