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
#include <functional>
#include <sstream>

#include "ffsim/errors.h"
#include "ffsim/event_sim.h"
#include "gtest/gtest.h"

using namespace ffsim;

namespace {

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Closed-form occupancy probability via inclusion-exclusion.
double occupancy_formula(int photons, int pixels, int clicks) {
    double sum = 0;
    for (int j = 0; j <= clicks; ++j) {
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(clicks, j) * std::pow(double(clicks - j) / pixels, photons);
    }
    return binomial(pixels, clicks) * sum;
}

// Brute force over all pixels^photons equally likely assignments.
std::vector<double> enumerate_assignments(int photons, int pixels) {
    std::vector<double> out(static_cast<std::size_t>(pixels + 1), 0.0);
    int total = 1;
    for (int i = 0; i < photons; ++i) total *= pixels;
    for (int code = 0; code < total; ++code) {
        unsigned mask = 0;
        int c = code;
        for (int i = 0; i < photons; ++i) {
            mask |= 1u << (c % pixels);
            c /= pixels;
        }
        out[static_cast<std::size_t>(__builtin_popcount(mask))] += 1.0 / total;
    }
    return out;
}

// Full event enumeration: each photon survives or not, survivors land on
// pixels, then click-level crosstalk.
std::vector<double> enumerate_detection_row(int photons, double t, int pixels, double eps) {
    std::vector<double> out(static_cast<std::size_t>(pixels + 1), 0.0);
    for (int subset = 0; subset < (1 << photons); ++subset) {
        int survivors = __builtin_popcount(static_cast<unsigned>(subset));
        double p_subset = std::pow(t, survivors) * std::pow(1 - t, photons - survivors);
        auto clicks = enumerate_assignments(survivors, pixels);
        for (int k = 0; k <= pixels; ++k) {
            double p = p_subset * clicks[static_cast<std::size_t>(k)];
            if (k >= 1 && k < pixels) {
                out[static_cast<std::size_t>(k)] += p * (1 - eps);
                out[static_cast<std::size_t>(k + 1)] += p * eps;
            } else {
                out[static_cast<std::size_t>(k)] += p;
            }
        }
    }
    return out;
}

}  // namespace

TEST(LossMatrix, identity_and_total_loss) {
    auto full = loss_matrix(1.0, 6);
    EXPECT_EQ(full.entries, Matrix::identity(7));
    auto none = loss_matrix(0.0, 6);
    for (std::size_t i = 0; i <= 6; ++i) {
        EXPECT_EQ(none.entries(i, 0), 1.0);
        for (std::size_t j = 1; j <= 6; ++j) EXPECT_EQ(none.entries(i, j), 0.0);
    }
}

TEST(LossMatrix, binomial_rows) {
    auto l = loss_matrix(0.7, 12);
    EXPECT_NEAR(l.entries(2, 0), 0.09, 1e-15);
    EXPECT_NEAR(l.entries(2, 1), 0.42, 1e-15);
    EXPECT_NEAR(l.entries(2, 2), 0.49, 1e-15);
    for (int i = 0; i <= 12; ++i) {
        for (int j = 0; j <= 12; ++j) {
            double expected = j > i ? 0.0 : binomial(i, j) * std::pow(0.7, j) * std::pow(0.3, i - j);
            EXPECT_NEAR(l.entries(std::size_t(i), std::size_t(j)), expected, 1e-14);
        }
    }
    EXPECT_LT(max_row_sum_error(l.entries), 1e-12);
}

TEST(LossMatrix, rejects_out_of_range) {
    EXPECT_THROW(loss_matrix(1.5, 3), ParameterError);
    EXPECT_THROW(loss_matrix(-0.1, 3), ParameterError);
}

TEST(ClickPovm, small_photon_numbers) {
    auto povm = click_povm(4, 6);
    EXPECT_EQ(povm.entries(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(povm.entries(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(povm.entries(2, 1), 0.25);
    EXPECT_DOUBLE_EQ(povm.entries(2, 2), 0.75);
    EXPECT_DOUBLE_EQ(povm.entries(3, 1), 1.0 / 16);
    EXPECT_DOUBLE_EQ(povm.entries(3, 2), 9.0 / 16);
    EXPECT_DOUBLE_EQ(povm.entries(3, 3), 6.0 / 16);
}

TEST(ClickPovm, matches_enumeration_and_closed_form) {
    for (int pixels : {1, 2, 3, 4, 5}) {
        auto povm = click_povm(std::size_t(pixels), 7);
        for (int n = 0; n <= 7; ++n) {
            auto brute = enumerate_assignments(n, pixels);
            for (int k = 0; k <= pixels; ++k) {
                double got = povm.entries(std::size_t(n), std::size_t(k));
                EXPECT_NEAR(got, brute[std::size_t(k)], 1e-12) << "N=" << pixels << " n=" << n << " k=" << k;
                if (n > 0) EXPECT_NEAR(got, occupancy_formula(n, pixels, k), 1e-12);
            }
        }
        EXPECT_LT(max_row_sum_error(povm.entries), 1e-12);
    }
}

TEST(ClickPovm, support_is_bounded) {
    auto povm = click_povm(4, 10);
    for (std::size_t n = 0; n <= 10; ++n) {
        for (std::size_t k = std::min<std::size_t>(n, 4) + 1; k <= 4; ++k) EXPECT_EQ(povm.entries(n, k), 0.0);
    }
    auto xt = apply_crosstalk(povm, 0.025);
    for (std::size_t n = 0; n <= 10; ++n) {
        for (std::size_t k = std::min<std::size_t>(n + (n >= 1 ? 1 : 0), 4) + 1; k <= 4; ++k) {
            EXPECT_EQ(xt.entries(n, k), 0.0);
        }
    }
}

TEST(Crosstalk, rule_by_hand) {
    ClickPovm povm{Matrix(2, 5), 4, 0.0};
    for (std::size_t k = 0; k < 5; ++k) {
        povm.entries(0, k) = std::array{0.0, 1.0, 0.0, 0.0, 0.0}[k];
        povm.entries(1, k) = std::array{0.0, 0.25, 0.75, 0.0, 0.0}[k];
    }
    auto out = apply_crosstalk(povm, 0.025);
    EXPECT_DOUBLE_EQ(out.entries(0, 1), 0.975);
    EXPECT_DOUBLE_EQ(out.entries(0, 2), 0.025);
    EXPECT_DOUBLE_EQ(out.entries(1, 1), 0.24375);
    EXPECT_DOUBLE_EQ(out.entries(1, 2), 0.7375);
    EXPECT_DOUBLE_EQ(out.entries(1, 3), 0.01875);
    EXPECT_EQ(out.entries(1, 4), 0.0);

    EXPECT_EQ(apply_crosstalk(povm, 0.0).entries, povm.entries);
    EXPECT_THROW(apply_crosstalk(povm, 1.0), ParameterError);
}

TEST(Crosstalk, full_row_does_not_donate) {
    ClickPovm povm{Matrix(1, 5), 4, 0.0};
    povm.entries(0, 4) = 1.0;
    auto out = apply_crosstalk(povm, 0.3);
    EXPECT_EQ(out.entries(0, 4), 1.0);
}

TEST(DetectionMatrix, reference_table_rows) {
    auto det = detection_matrix(0.7, 4, 0.025, 10);
    const double table[11][5] = {
        {1.000, 0.000, 0.000, 0.000, 0.000}, {0.300, 0.682, 0.017, 0.000, 0.000},
        {0.090, 0.529, 0.372, 0.009, 0.000}, {0.027, 0.313, 0.519, 0.139, 0.003},
        {0.008, 0.167, 0.500, 0.295, 0.030}, {0.002, 0.085, 0.412, 0.417, 0.084},
        {0.001, 0.042, 0.312, 0.487, 0.158}, {0.000, 0.020, 0.225, 0.510, 0.245},
        {0.000, 0.010, 0.157, 0.498, 0.335}, {0.000, 0.005, 0.107, 0.465, 0.423},
        {0.000, 0.002, 0.072, 0.421, 0.505},
    };
    for (std::size_t n = 0; n <= 10; ++n) {
        for (std::size_t k = 0; k <= 4; ++k) {
            // Printed to three decimals; 0.6825 -> 0.682 sits exactly on the half-unit.
            EXPECT_LE(std::abs(det.entries(n, k) - table[n][k]), 5e-4 + 1e-12) << "n=" << n << " k=" << k;
        }
    }
}

TEST(DetectionMatrix, matches_event_enumeration) {
    auto det = detection_matrix(0.7, 4, 0.025, 8);
    for (int n = 0; n <= 8; ++n) {
        auto row = enumerate_detection_row(n, 0.7, 4, 0.025);
        for (std::size_t k = 0; k <= 4; ++k) EXPECT_NEAR(det.entries(std::size_t(n), k), row[k], 1e-13);
    }
    EXPECT_LT(max_row_sum_error(det.entries), 1e-10);
}

TEST(DetectionMatrix, ideal_composition_equals_bare_povm) {
    EXPECT_EQ(detection_matrix(1.0, 4, 0.0, 12).entries, click_povm(4, 12).entries);
}

TEST(DetectionMatrix, monte_carlo_rows_within_three_sigma) {
    auto det = detection_matrix(0.7, 4, 0.025, 6);
    StreamRng rng(2024, 0, 99);
    constexpr int kSamples = 1'000'000;
    for (std::size_t n = 0; n <= 6; ++n) {
        std::vector<int> counts(5, 0);
        for (int s = 0; s < kSamples; ++s) ++counts[sample_clicks(n, 0.7, 4, 0.025, rng)];
        for (std::size_t k = 0; k <= 4; ++k) {
            double p = det.entries(n, k);
            double sigma = std::sqrt(kSamples * p * (1 - p));
            EXPECT_LE(std::abs(counts[k] - kSamples * p), 3 * sigma + 1e-9) << "n=" << n << " k=" << k;
        }
    }
}

TEST(DetectionMatrix, csv_export) {
    std::ostringstream out;
    write_matrix_csv(out, perfect_pnr_matrix(1).entries, 3);
    EXPECT_EQ(out.str(), "n,k0,k1\n0,1.000,0.000\n1,0.000,1.000\n");
}
