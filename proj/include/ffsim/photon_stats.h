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

#ifndef FFSIM_PHOTON_STATS_H
#define FFSIM_PHOTON_STATS_H

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ffsim {

inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kDefaultTailTolerance = 1e-9;

enum class SourceFamily { kPoissonian, kThermal };

std::string_view to_string(SourceFamily family);
SourceFamily parse_source_family(std::string_view text);

/// Photon-number-diagonal statistics P(n) for n = 0..n_max.
///
/// Construction validates that every entry lies in [0, 1] and that the
/// entries sum to one within kNormalizationTolerance. Use renormalize() to
/// build a distribution from unnormalized weights.
class PhotonNumberDistribution {
   public:
    explicit PhotonNumberDistribution(std::vector<double> probs);

    /// Fock state |n>, supported on exactly one photon number.
    static PhotonNumberDistribution fock(std::size_t n, std::size_t n_max);

    std::span<const double> probs() const { return probs_; }
    double operator[](std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    std::size_t n_max() const { return probs_.size() - 1; }

   private:
    std::vector<double> probs_;
};

/// Probability mass above n_max that a window [0, n_max] would discard.
double tail_mass(SourceFamily family, double mean, std::size_t n_max);

/// Smallest n_max whose discarded tail mass does not exceed tail_tolerance.
std::size_t required_n_max(SourceFamily family, double mean, double tail_tolerance = kDefaultTailTolerance);

/// Poissonian P(n) = e^-mean mean^n / n!, renormalized over [0, n_max].
///
/// Throws ParameterError for a negative or non-finite mean, and
/// TruncationError (carrying the required cutoff) if the window discards
/// more than tail_tolerance.
PhotonNumberDistribution poissonian(double mean, std::size_t n_max,
                                    double tail_tolerance = kDefaultTailTolerance);

/// Single-mode thermal P(n) = mean^n / (1 + mean)^(n + 1), renormalized over [0, n_max].
PhotonNumberDistribution thermal(double mean, std::size_t n_max, double tail_tolerance = kDefaultTailTolerance);

PhotonNumberDistribution source_distribution(SourceFamily family, double mean, std::size_t n_max,
                                             double tail_tolerance = kDefaultTailTolerance);

double mean_photon_number(const PhotonNumberDistribution &dist);
double variance(const PhotonNumberDistribution &dist);

/// Zero-delay second-order correlation sum n(n-1)P(n) / (sum n P(n))^2.
/// Throws UndefinedStatisticError when the mean photon number is zero.
double g2_zero(const PhotonNumberDistribution &dist);

/// Divides non-negative weights by their total. Throws EmptyEnsembleError on zero mass.
PhotonNumberDistribution renormalize(std::span<const double> weights);

}  // namespace ffsim

#endif
