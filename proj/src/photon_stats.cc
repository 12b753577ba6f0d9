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

#include "ffsim/photon_stats.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ffsim/errors.h"

namespace ffsim {

namespace {

void check_mean(double mean) {
    if (!std::isfinite(mean) || mean < 0) {
        std::ostringstream msg;
        msg << "mean photon number must be finite and >= 0, got " << mean;
        throw ParameterError(msg.str());
    }
}

double log_term(SourceFamily family, double mean, std::size_t n) {
    const double k = static_cast<double>(n);
    if (family == SourceFamily::kPoissonian) {
        return -mean + k * std::log(mean) - std::lgamma(k + 1.0);
    }
    return k * std::log(mean) - (k + 1.0) * std::log1p(mean);
}

double term(SourceFamily family, double mean, std::size_t n) {
    if (mean == 0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(log_term(family, mean, n));
}

PhotonNumberDistribution build(SourceFamily family, double mean, std::size_t n_max, double tail_tolerance) {
    check_mean(mean);
    if (double tail = tail_mass(family, mean, n_max); tail > tail_tolerance) {
        std::size_t needed = required_n_max(family, mean, tail_tolerance);
        std::ostringstream msg;
        msg << to_string(family) << " distribution with mean " << mean << " truncated at n_max=" << n_max
            << " discards tail mass " << tail << " > " << tail_tolerance << "; need n_max >= " << needed;
        throw TruncationError(msg.str(), needed);
    }
    std::vector<double> weights(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        weights[n] = term(family, mean, n);
    }
    return renormalize(weights);
}

}  // namespace

std::string_view to_string(SourceFamily family) {
    return family == SourceFamily::kPoissonian ? "poissonian" : "thermal";
}

SourceFamily parse_source_family(std::string_view text) {
    if (text == "poissonian" || text == "poisson") {
        return SourceFamily::kPoissonian;
    }
    if (text == "thermal") {
        return SourceFamily::kThermal;
    }
    throw ParameterError("unknown source family '" + std::string(text) + "' (expected poissonian|thermal)");
}

PhotonNumberDistribution::PhotonNumberDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw ParameterError("photon-number distribution needs at least one entry");
    }
    double total = 0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream msg;
            msg << "probability " << p << " outside [0, 1]";
            throw ParameterError(msg.str());
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "probabilities sum to " << total << ", not 1";
        throw ParameterError(msg.str());
    }
}

PhotonNumberDistribution PhotonNumberDistribution::fock(std::size_t n, std::size_t n_max) {
    if (n > n_max) {
        throw ParameterError("Fock state photon number exceeds n_max");
    }
    std::vector<double> probs(n_max + 1, 0.0);
    probs[n] = 1.0;
    return PhotonNumberDistribution(std::move(probs));
}

double tail_mass(SourceFamily family, double mean, std::size_t n_max) {
    check_mean(mean);
    if (mean == 0) {
        return 0.0;
    }
    if (family == SourceFamily::kThermal) {
        return std::exp(static_cast<double>(n_max + 1) * std::log(mean / (1.0 + mean)));
    }
    // Direct summation of the Poissonian tail; terms past the mode decay
    // geometrically so the loop ends once they stop contributing.
    double tail = 0;
    for (std::size_t n = n_max + 1;; ++n) {
        double t = term(family, mean, n);
        tail += t;
        if (static_cast<double>(n) > mean && t <= tail * 1e-17) {
            break;
        }
        if (static_cast<double>(n) > mean && t < std::numeric_limits<double>::min()) {
            break;
        }
    }
    return tail;
}

std::size_t required_n_max(SourceFamily family, double mean, double tail_tolerance) {
    check_mean(mean);
    if (!(tail_tolerance > 0)) {
        throw ParameterError("tail tolerance must be positive");
    }
    if (mean == 0) {
        return 0;
    }
    if (family == SourceFamily::kThermal) {
        double n = std::ceil(std::log(tail_tolerance) / std::log(mean / (1.0 + mean))) - 1.0;
        std::size_t guess = n < 0 ? 0 : static_cast<std::size_t>(n);
        while (guess > 0 && tail_mass(family, mean, guess - 1) <= tail_tolerance) {
            --guess;
        }
        while (tail_mass(family, mean, guess) > tail_tolerance) {
            ++guess;
        }
        return guess;
    }
    std::size_t n_max = static_cast<std::size_t>(mean);
    while (tail_mass(family, mean, n_max) > tail_tolerance) {
        ++n_max;
    }
    while (n_max > 0 && tail_mass(family, mean, n_max - 1) <= tail_tolerance) {
        --n_max;
    }
    return n_max;
}

PhotonNumberDistribution poissonian(double mean, std::size_t n_max, double tail_tolerance) {
    return build(SourceFamily::kPoissonian, mean, n_max, tail_tolerance);
}

PhotonNumberDistribution thermal(double mean, std::size_t n_max, double tail_tolerance) {
    return build(SourceFamily::kThermal, mean, n_max, tail_tolerance);
}

PhotonNumberDistribution source_distribution(SourceFamily family, double mean, std::size_t n_max,
                                             double tail_tolerance) {
    return build(family, mean, n_max, tail_tolerance);
}

double mean_photon_number(const PhotonNumberDistribution &dist) {
    double mean = 0;
    auto p = dist.probs();
    for (std::size_t n = 1; n < p.size(); ++n) {
        mean += static_cast<double>(n) * p[n];
    }
    return mean;
}

double variance(const PhotonNumberDistribution &dist) {
    double mean = mean_photon_number(dist);
    double second = 0;
    auto p = dist.probs();
    for (std::size_t n = 1; n < p.size(); ++n) {
        double k = static_cast<double>(n);
        second += k * k * p[n];
    }
    return second - mean * mean;
}

double g2_zero(const PhotonNumberDistribution &dist) {
    double mean = 0;
    double factorial_moment = 0;
    auto p = dist.probs();
    for (std::size_t n = 1; n < p.size(); ++n) {
        double k = static_cast<double>(n);
        mean += k * p[n];
        factorial_moment += k * (k - 1.0) * p[n];
    }
    if (mean <= 0) {
        throw UndefinedStatisticError("g2(0) is undefined for a distribution with zero mean photon number");
    }
    return factorial_moment / (mean * mean);
}

PhotonNumberDistribution renormalize(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) {
            throw ParameterError("weights must be finite and non-negative");
        }
        total += w;
    }
    if (total <= 0) {
        throw EmptyEnsembleError("cannot renormalize a distribution with zero total mass");
    }
    std::vector<double> probs(weights.begin(), weights.end());
    for (double &p : probs) {
        p /= total;
    }
    return PhotonNumberDistribution(std::move(probs));
}

}  // namespace ffsim
