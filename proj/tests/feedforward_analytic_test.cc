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

#include "ffsim/feedforward_analytic.h"

#include <cmath>
#include <sstream>

#include "ffsim/errors.h"
#include "gtest/gtest.h"

using namespace ffsim;

namespace {

DetectionMatrix reference_det(std::size_t n_max, double eps = 0.025) { return detection_matrix(0.7, 4, eps, n_max); }

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Heralded g2 by brute force: enumerate every idler photon subset, pixel
// assignment and crosstalk branch, accumulating the joint weight of the
// signal photon number alongside each accepted herald.
double enumerated_heralded_g2(double mu, int n_cut, double t, int pixels, double eps, const HeraldSelection &sel) {
    std::vector<double> weight(static_cast<std::size_t>(n_cut + 1), 0.0);
    double pn = std::exp(-mu);
    for (int n = 0; n <= n_cut; ++n) {
        if (n > 0) pn *= mu / n;
        for (int surv = 0; surv <= n; ++surv) {
            double p_surv = binomial(n, surv) * std::pow(t, surv) * std::pow(1 - t, n - surv);
            int assignments = 1;
            for (int i = 0; i < surv; ++i) assignments *= pixels;
            for (int code = 0; code < assignments; ++code) {
                unsigned mask = 0;
                for (int i = 0, c = code; i < surv; ++i, c /= pixels) mask |= 1u << (c % pixels);
                int k = __builtin_popcount(mask);
                double p = pn * p_surv / assignments;
                if (k >= 1 && k < pixels) {
                    if (sel.accepts(std::size_t(k))) weight[std::size_t(n)] += p * (1 - eps);
                    if (sel.accepts(std::size_t(k + 1))) weight[std::size_t(n)] += p * eps;
                } else if (sel.accepts(std::size_t(k))) {
                    weight[std::size_t(n)] += p;
                }
            }
        }
    }
    double m1 = 0, m2 = 0, total = 0;
    for (int n = 0; n <= n_cut; ++n) {
        total += weight[std::size_t(n)];
        m1 += n * weight[std::size_t(n)];
        m2 += n * (n - 1) * weight[std::size_t(n)];
    }
    return m2 * total / (m1 * m1);
}

}  // namespace

TEST(HeraldSelection, parsing) {
    EXPECT_EQ(HeraldSelection::parse("2", 4).accepted_clicks(), (std::vector<std::size_t>{2}));
    EXPECT_EQ(HeraldSelection::parse("1,2", 4).accepted_clicks(), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(HeraldSelection::parse(">=1", 4).accepted_clicks(), (std::vector<std::size_t>{1, 2, 3, 4}));
    EXPECT_EQ(HeraldSelection::parse("all", 2).accepted_clicks(), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_THROW(HeraldSelection::parse("", 4), ParameterError);
    EXPECT_THROW(HeraldSelection::parse("5", 4), ParameterError);
    EXPECT_THROW(HeraldSelection::parse("x", 4), ParameterError);
    EXPECT_THROW(HeraldSelection({}, "none"), ParameterError);
}

TEST(HeraldSelection, membership) {
    auto sel = HeraldSelection::at_least(2, 4);
    EXPECT_FALSE(sel.accepts(1));
    EXPECT_TRUE(sel.accepts(2));
    EXPECT_TRUE(sel.accepts(4));
    EXPECT_EQ(sel.max_accepted(), 4u);
}

TEST(HeraldedDistribution, perfect_detector_limits) {
    auto det = perfect_pnr_matrix(30);
    for (double mu : {1e-4, 0.1, 2.0}) {
        auto source = poissonian(mu, 30);
        auto one = heralded_distribution(source, det, HeraldSelection::exactly(1));
        EXPECT_EQ(g2_zero(one.distribution), 0.0);
        EXPECT_DOUBLE_EQ(one.distribution[1], 1.0);
        EXPECT_NEAR(one.acceptance, source[1], 1e-15);
        auto two = heralded_distribution(source, det, HeraldSelection::exactly(2));
        EXPECT_NEAR(g2_zero(two.distribution), 0.5, 1e-9);
    }
    auto thermal_source = thermal(0.5, 30, 1e-6);
    EXPECT_EQ(g2_zero(heralded_distribution(thermal_source, det, HeraldSelection::exactly(1)).distribution), 0.0);
}

TEST(HeraldedDistribution, crosstalk_false_heralds_dominate_two_click_at_low_mean) {
    // At mu = 1e-4 one-photon events with a crosstalk click outnumber genuine
    // pairs by about a thousand to one, so the heralded state is nearly |1>.
    auto sel = HeraldSelection::exactly(2);
    auto source = poissonian(1e-4, 10);
    double with_xt = g2_zero(heralded_distribution(source, reference_det(10), sel).distribution);
    double without = g2_zero(heralded_distribution(source, reference_det(10, 0.0), sel).distribution);
    EXPECT_NEAR(without, 0.5, 1e-3);
    EXPECT_LT(with_xt, 0.01);
    EXPECT_NEAR(with_xt, enumerated_heralded_g2(1e-4, 8, 0.7, 4, 0.025, sel), 1e-9);
    EXPECT_NEAR(without, enumerated_heralded_g2(1e-4, 8, 0.7, 4, 0.0, sel), 1e-9);
}

TEST(HeraldedDistribution, agrees_with_enumeration) {
    for (double mu : {1e-4, 0.05, 0.3}) {
        for (const auto &sel : {HeraldSelection::exactly(1), HeraldSelection::exactly(2),
                                HeraldSelection::at_least(1, 4), HeraldSelection::parse("1,3", 4)}) {
            auto source = poissonian(mu, 9, 1.0);
            double got = g2_zero(heralded_distribution(source, reference_det(9), sel).distribution);
            EXPECT_NEAR(got, enumerated_heralded_g2(mu, 9, 0.7, 4, 0.025, sel), 1e-9)
                << "mu=" << mu << " sel=" << sel.label();
        }
    }
}

TEST(HeraldedDistribution, errors) {
    auto det = reference_det(10);
    EXPECT_THROW(heralded_distribution(poissonian(0.1, 12), det, HeraldSelection::exactly(1)), ParameterError);
    EXPECT_THROW(heralded_distribution(poissonian(0.0, 10), det, HeraldSelection::exactly(1)), EmptyEnsembleError);
    EXPECT_THROW(heralded_distribution(poissonian(0.1, 10), perfect_pnr_matrix(10), HeraldSelection::exactly(11)),
                 ParameterError);
}

TEST(G2Sweep, single_click_low_mean_is_small) {
    auto points = g2_sweep(reference_det(12), HeraldSelection::exactly(1), {1e-6}, SourceFamily::kPoissonian);
    ASSERT_EQ(points.size(), 1u);
    EXPECT_LT(points[0].g2, 1e-3);
    EXPECT_GT(points[0].g2, 0.0);
}

TEST(G2Sweep, two_click_rises_towards_half_as_genuine_pairs_take_over) {
    auto det = reference_det(40);
    auto points = g2_sweep(det, HeraldSelection::exactly(2), default_mean_grid(), SourceFamily::kPoissonian);
    for (std::size_t i = 1; i < points.size(); ++i) EXPECT_GT(points[i].g2, points[i - 1].g2);
    EXPECT_LT(points.front().g2, 0.01);
    auto mid = g2_sweep(det, HeraldSelection::exactly(2), {0.12}, SourceFamily::kPoissonian);
    EXPECT_NEAR(mid[0].g2, 0.5, 0.02);
}

TEST(G2Sweep, thermal_not_below_poissonian) {
    auto det = reference_det(40);
    auto grid = log_grid(1e-3, 1.0, 12);
    auto poisson = g2_sweep(det, HeraldSelection::exactly(1), grid, SourceFamily::kPoissonian);
    auto therm = g2_sweep(det, HeraldSelection::exactly(1), grid, SourceFamily::kThermal);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_GE(therm[i].g2, poisson[i].g2);
}

TEST(G2Sweep, single_click_monotone_on_default_grid) {
    auto points = g2_sweep(reference_det(20), HeraldSelection::exactly(1), default_mean_grid(), SourceFamily::kPoissonian);
    ASSERT_EQ(points.size(), 30u);
    for (std::size_t i = 1; i < points.size(); ++i) EXPECT_GE(points[i].g2, points[i - 1].g2);
}

TEST(G2Sweep, rejects_bad_grids) {
    auto det = reference_det(10);
    EXPECT_THROW(g2_sweep(det, HeraldSelection::exactly(1), {0.1, 0.01}, SourceFamily::kPoissonian), ParameterError);
    EXPECT_THROW(g2_sweep(det, HeraldSelection::exactly(1), {0.0}, SourceFamily::kPoissonian), ParameterError);
    EXPECT_THROW(g2_sweep(det, HeraldSelection::exactly(1), {5.0}, SourceFamily::kPoissonian), TruncationError);
}

TEST(G2Sweep, csv_columns) {
    std::ostringstream out;
    auto sel = HeraldSelection::exactly(1);
    write_sweep_csv(out, {{0.5, 0.25, 0.1}}, sel, SourceFamily::kThermal);
    EXPECT_EQ(out.str(), "mean,g2,acceptance,selection_label,family\n0.5,0.25,0.1," + sel.label() + ",thermal\n");
}

TEST(LogGrid, endpoints_and_ratio) {
    auto grid = log_grid(1e-4, 1.0, 5);
    EXPECT_DOUBLE_EQ(grid.front(), 1e-4);
    EXPECT_DOUBLE_EQ(grid.back(), 1.0);
    EXPECT_NEAR(grid[1] / grid[0], 10.0, 1e-12);
}

TEST(TwoClickFraction, reference_rates) {
    double f = genuine_two_click_fraction(825000, 56000, 0.025);
    EXPECT_NEAR(f, 1.0 - 825000 * 0.025 / 0.975 / 56000, 1e-12);
    EXPECT_GE(f, 0.60);
    EXPECT_LE(f, 0.66);
}

TEST(TwoClickFraction, boundaries) {
    EXPECT_EQ(genuine_two_click_fraction(825000, 56000, 0.0), 1.0);
    double eps = 0.025;
    double crosstalk = 1000 * eps / (1 - eps);
    EXPECT_NEAR(genuine_two_click_fraction(1000, crosstalk, eps), 0.0, 1e-12);
    EXPECT_THROW(genuine_two_click_fraction(1000, crosstalk * 0.5, eps), InconsistencyError);
    EXPECT_THROW(genuine_two_click_fraction(0, 10, eps), ParameterError);
}
