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

#ifndef FFSIM_DETECTOR_MODEL_H
#define FFSIM_DETECTOR_MODEL_H

#include <cstddef>
#include <iosfwd>

#include "ffsim/matrix.h"

namespace ffsim {

/// Binomial loss channel. entries(i, j) is the probability that j of i
/// incident photons are transmitted.
struct LossMatrix {
    Matrix entries;
    double transmission = 1.0;
};

/// Click statistics of an N-pixel array. entries(n, k) is the probability
/// that n photons arriving at the array produce k clicks, k = 0..N.
struct ClickPovm {
    Matrix entries;
    std::size_t n_pixels = 0;
    double crosstalk_prob = 0.0;
};

/// End-to-end p(n, n'): created photon number n to measured click count n'.
struct DetectionMatrix {
    Matrix entries;

    std::size_t n_max() const { return entries.rows() - 1; }
    std::size_t max_clicks() const { return entries.cols() - 1; }
};

LossMatrix loss_matrix(double transmission, std::size_t n_max);

/// Ideal click POVM: every photon lands on a uniformly random pixel and a
/// pixel clicks if it absorbs at least one photon.
ClickPovm click_povm(std::size_t n_pixels, std::size_t n_max);

/// Click-level crosstalk. Each outcome k in 1..N-1 hands a fraction
/// crosstalk_prob of its probability to outcome k+1. Requires 0 <= eps < 1.
ClickPovm apply_crosstalk(const ClickPovm &povm, double crosstalk_prob);

/// p(n, n') = sum_j L(n, j) Pi(j, n') with Pi the crosstalk-adjusted POVM.
DetectionMatrix detection_matrix(double transmission, std::size_t n_pixels, double crosstalk_prob,
                                 std::size_t n_max);

/// Perfect photon-number resolution: p(n, n') = delta(n, n'), n' = 0..n_max.
DetectionMatrix perfect_pnr_matrix(std::size_t n_max);

/// One header line "n,k0,k1,..." then one row per incident photon number.
void write_matrix_csv(std::ostream &out, const Matrix &m, int precision = 6);

}  // namespace ffsim

#endif
