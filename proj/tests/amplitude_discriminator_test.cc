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

#include "ffsim/amplitude_discriminator.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "ffsim/errors.h"
#include "gtest/gtest.h"

using namespace ffsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return g;
}

}  // namespace

TEST(TriggerProbability, noiseless_window) {
    AmplitudeModel model{1.0, 0.0, 0.0};
    TriggerWindow window{1.5, 2.5};
    EXPECT_EQ(trigger_probability(2, window, model), 1.0);
    EXPECT_EQ(trigger_probability(1, window, model), 0.0);
    EXPECT_EQ(trigger_probability(2, TriggerWindow{2.0, 3.0}, model), 1.0);
    EXPECT_EQ(trigger_probability(3, TriggerWindow{2.0, 3.0}, model), 0.0);
}

TEST(TriggerProbability, five_sigma_tail) {
    AmplitudeModel model{1.0, 0.1, 0.0};
    // Window starts halfway between the 2- and 3-click amplitudes.
    double p = trigger_probability(2, TriggerWindow{2.5, kInf}, model);
    EXPECT_NEAR(p, 0.5 * std::erfc(5.0 / std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(p, 2.8665e-7, 1e-10);
}

TEST(TriggerProbability, validation) {
    EXPECT_THROW(trigger_probability(1, TriggerWindow{1.0, 0.5}, AmplitudeModel{}), ParameterError);
    EXPECT_THROW(trigger_probability(1, TriggerWindow{0.5, 1.0}, AmplitudeModel{1.0, -0.1, 0.0}), ParameterError);
    EXPECT_THROW(trigger_probability(1, TriggerWindow{0.5, 1.0}, AmplitudeModel{0.0, 0.1, 0.0}), ParameterError);
}

TEST(TriggerProbability, windows_partition_the_line) {
    AmplitudeModel model = AmplitudeModel::with_default_noise(0.8, 0.1);
    for (std::size_t k = 0; k <= 4; ++k) {
        double a = trigger_probability(k, TriggerWindow{-kInf, 1.3}, model);
        double b = trigger_probability(k, TriggerWindow{1.3, 2.1}, model);
        double c = trigger_probability(k, TriggerWindow{2.1, kInf}, model);
        EXPECT_NEAR(a + b + c, 1.0, 1e-14);
    }
}

TEST(ThresholdSweep, limits) {
    auto det = detection_matrix(0.7, 4, 0.025, 30);
    auto source = poissonian(1.0, 30);
    auto model = AmplitudeModel::with_default_noise(1.0);
    auto clicks = click_distribution(source, det);
    double rep = 80e6;
    auto surface = threshold_sweep(source, det, model, rep, {0.5, 4.6}, {kInf});
    EXPECT_NEAR(surface.at(0, 0), rep * (1.0 - clicks[0]), 1e-3);
    EXPECT_LT(surface.at(1, 0), 1e-3);
}

TEST(ThresholdSweep, noiseless_steps_match_click_tiers) {
    auto det = detection_matrix(0.7, 4, 0.025, 30);
    auto source = poissonian(1.0, 30);
    auto clicks = click_distribution(source, det);
    double rep = 1e6;
    std::vector<double> lows{0.5, 1.5, 2.5, 3.5};
    auto surface = threshold_sweep(source, det, AmplitudeModel{1.0, 0.0, 0.0}, rep, lows, {1.5, 2.5, 3.5, 4.5});
    for (std::size_t l = 0; l < lows.size(); ++l) {
        for (std::size_t h = 0; h < 4; ++h) {
            double expected = 0;
            for (std::size_t k = l + 1; k <= h + 1; ++k) expected += clicks[k];
            EXPECT_NEAR(surface.at(l, h), rep * expected, 1e-9) << l << "," << h;
        }
    }
}

TEST(ThresholdSweep, monotone_property) {
    auto det = detection_matrix(0.7, 4, 0.025, 30);
    auto source = poissonian(1.5, 30);
    auto surface = threshold_sweep(source, det, AmplitudeModel::with_default_noise(1.0), 1e6,
                                   linear_grid(-0.5, 4.5, 41), linear_grid(-0.5, 5.5, 41));
    for (std::size_t l = 0; l < 41; ++l) {
        for (std::size_t h = 0; h < 41; ++h) {
            EXPECT_GE(surface.at(l, h), 0.0);
            if (l + 1 < 41) EXPECT_LE(surface.at(l + 1, h), surface.at(l, h) + 1e-9);
            if (h + 1 < 41) EXPECT_GE(surface.at(l, h + 1), surface.at(l, h) - 1e-9);
            if (surface.low_grid[l] >= surface.high_grid[h]) EXPECT_EQ(surface.at(l, h), 0.0);
        }
    }
}

TEST(ClickDistribution, sums_to_one) {
    auto clicks = click_distribution(poissonian(0.4, 20), detection_matrix(0.7, 4, 0.025, 20));
    double total = 0;
    for (double c : clicks) total += c;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_THROW(click_distribution(poissonian(0.4, 21), detection_matrix(0.7, 4, 0.025, 20)), ParameterError);
}

TEST(Plateaus, detection) {
    std::vector<double> v{5, 5, 5, 5, 5, 3, 2, 2, 2, 2, 2, 2, 1, 0, 0, 0};
    auto p = find_plateaus(v, 1e-3, 5);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].first, 0u);
    EXPECT_EQ(p[0].last, 4u);
    EXPECT_EQ(p[0].level, 5.0);
    EXPECT_EQ(p[1].first, 6u);
    EXPECT_EQ(p[1].last, 11u);
    EXPECT_TRUE(find_plateaus({1, 2, 3, 4, 5, 6}, 1e-3, 2).empty());
}

TEST(SurfaceCsv, infinite_high) {
    RateSurface s{{0.5}, {kInf}, {12.5}};
    std::ostringstream out;
    write_surface_csv(out, s);
    EXPECT_EQ(out.str(), "low,high,rate_hz\n0.5,inf,12.5\n");
}
