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

#include "ffsim/detector_model.h"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ffsim/errors.h"

namespace ffsim {

Matrix multiply(const Matrix &a, const Matrix &b) {
    if (a.cols() != b.rows()) {
        throw ParameterError("matrix shapes do not compose");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            double aij = a(i, j);
            if (aij == 0) {
                continue;
            }
            for (std::size_t k = 0; k < b.cols(); ++k) {
                out(i, k) += aij * b(j, k);
            }
        }
    }
    return out;
}

double max_row_sum_error(const Matrix &m) {
    double worst = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double total = 0;
        for (double v : m.row(r)) {
            total += v;
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return worst;
}

LossMatrix loss_matrix(double transmission, std::size_t n_max) {
    if (!(transmission >= 0.0 && transmission <= 1.0)) {
        std::ostringstream msg;
        msg << "transmission must lie in [0, 1], got " << transmission;
        throw ParameterError(msg.str());
    }
    // Row i is Binomial(i, T), built by the recursion
    // L(i+1, j) = (1-T) L(i, j) + T L(i, j-1), which avoids large binomials.
    Matrix m(n_max + 1, n_max + 1);
    m(0, 0) = 1.0;
    for (std::size_t i = 0; i < n_max; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            m(i + 1, j) += (1.0 - transmission) * m(i, j);
            m(i + 1, j + 1) += transmission * m(i, j);
        }
    }
    return {std::move(m), transmission};
}

ClickPovm click_povm(std::size_t n_pixels, std::size_t n_max) {
    if (n_pixels == 0) {
        throw ParameterError("a detector array needs at least one pixel");
    }
    // Occupancy recursion: photon n+1 either hits one of the k pixels that
    // already fired, or one of the N-k that have not.
    const double pixels = static_cast<double>(n_pixels);
    Matrix m(n_max + 1, n_pixels + 1);
    m(0, 0) = 1.0;
    for (std::size_t n = 0; n < n_max; ++n) {
        for (std::size_t k = 0; k <= n_pixels; ++k) {
            double p = m(n, k);
            if (p == 0) {
                continue;
            }
            double k_fired = static_cast<double>(k);
            m(n + 1, k) += p * k_fired / pixels;
            if (k < n_pixels) {
                m(n + 1, k + 1) += p * (pixels - k_fired) / pixels;
            }
        }
    }
    return {std::move(m), n_pixels, 0.0};
}

ClickPovm apply_crosstalk(const ClickPovm &povm, double crosstalk_prob) {
    if (!(crosstalk_prob >= 0.0 && crosstalk_prob < 1.0)) {
        std::ostringstream msg;
        msg << "crosstalk probability must lie in [0, 1), got " << crosstalk_prob;
        throw ParameterError(msg.str());
    }
    ClickPovm out = povm;
    out.crosstalk_prob = crosstalk_prob;
    if (crosstalk_prob == 0) {
        return out;
    }
    for (std::size_t n = 0; n < povm.entries.rows(); ++n) {
        for (std::size_t k = 1; k < povm.n_pixels; ++k) {
            double moved = povm.entries(n, k) * crosstalk_prob;
            out.entries(n, k) -= moved;
            out.entries(n, k + 1) += moved;
        }
    }
    return out;
}

DetectionMatrix detection_matrix(double transmission, std::size_t n_pixels, double crosstalk_prob,
                                 std::size_t n_max) {
    LossMatrix loss = loss_matrix(transmission, n_max);
    ClickPovm povm = apply_crosstalk(click_povm(n_pixels, n_max), crosstalk_prob);
    return {multiply(loss.entries, povm.entries)};
}

DetectionMatrix perfect_pnr_matrix(std::size_t n_max) { return {Matrix::identity(n_max + 1)}; }

void write_matrix_csv(std::ostream &out, const Matrix &m, int precision) {
    out << "n";
    for (std::size_t k = 0; k < m.cols(); ++k) {
        out << ",k" << k;
    }
    out << "\n" << std::fixed << std::setprecision(precision);
    for (std::size_t n = 0; n < m.rows(); ++n) {
        out << n;
        for (double v : m.row(n)) {
            out << "," << v;
        }
        out << "\n";
    }
    out.unsetf(std::ios::floatfield);
}

}  // namespace ffsim
