#include "dynmkw/model_select.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace dynmkw;

namespace {

std::vector<double> kinked(Index points, Index kink, double fast, double slow, double offset = 0.0) {
    std::vector<double> y;
    for (Index d = 0; d < points; ++d) {
        y.push_back(offset + fast * std::min(d, kink) + slow * std::max<Index>(0, d - kink));
    }
    return y;
}

}  // namespace

TEST(SelectChangeCount, ExactKink) {
    const SlopeSelection s = select_change_count(kinked(11, 5, 10.0, 0.1));
    EXPECT_EQ(s.change_points, 5);
    EXPECT_FALSE(s.low_confidence);
    const auto it = std::find_if(s.rss_curve.begin(), s.rss_curve.end(),
                                 [](const KinkFit& f) { return f.change_points == 5; });
    ASSERT_NE(it, s.rss_curve.end());
    EXPECT_NEAR(it->rss, 0.0, 1e-18);
}

TEST(SelectChangeCount, EveryKinkPosition) {
    const Index d_max = 20;
    for (Index kink = 2; kink <= d_max - 2; ++kink) {
        // a * min(D, kink) + b * D + c with a >> b > 0
        std::vector<double> y;
        for (Index d = 0; d <= d_max; ++d) y.push_back(50.0 * std::min(d, kink) + 0.5 * d + 3.0);
        EXPECT_EQ(select_change_count(y).change_points, kink);
    }
}

TEST(SelectChangeCount, LinearInputIsLowConfidence) {
    std::vector<double> y;
    for (int d = 0; d <= 10; ++d) y.push_back(2.0 * d + 1.0);
    const SlopeSelection s = select_change_count(y);
    EXPECT_EQ(s.change_points, 1);
    EXPECT_TRUE(s.low_confidence);
    for (const KinkFit& f : s.rss_curve) EXPECT_NEAR(f.rss, 0.0, 1e-20);
}

TEST(SelectChangeCount, AffineInvariant) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> y = kinked(16, 4, 30.0, 1.0);
        for (double& v : y) v += noise(rng);
        std::vector<double> z;
        for (double v : y) z.push_back(1e4 * v - 777.0);
        EXPECT_EQ(select_change_count(y).change_points, select_change_count(z).change_points);
    }
}

TEST(SelectChangeCount, NeedsFourPoints) {
    const std::vector<double> y{1, 2, 3};
    EXPECT_THROW(select_change_count(y), std::invalid_argument);
    const std::vector<double> four{0, 10, 11, 12};
    EXPECT_EQ(select_change_count(four).change_points, 1);
}

TEST(ZeroGate, StrongStepIsSignificantAtTheFloor) {
    std::mt19937_64 rng(2);
    Matrix x = 0.1 * oracle::random_matrix(rng, 80, 3);
    x.bottomRows(40).col(0).array() += 3.0;
    const GateResult g = zero_gate(ObservationMatrix(x), 0.05, {.replicates = 199, .seed = 9});
    EXPECT_TRUE(g.significant);
    EXPECT_EQ(g.pvalue, 1.0 / 200);
    EXPECT_EQ(g.scan.best_boundary, 40);
}

TEST(ZeroGate, AlphaZeroNeverFires) {
    std::mt19937_64 rng(3);
    Matrix x = 0.1 * oracle::random_matrix(rng, 60, 2);
    x.bottomRows(30).array() += 5.0;
    EXPECT_FALSE(zero_gate(ObservationMatrix(x), 0.0, {.replicates = 99, .seed = 1}).significant);
    EXPECT_THROW(zero_gate(ObservationMatrix(x), 1.0, {.replicates = 9}), std::invalid_argument);
}

TEST(ZeroGate, LevelOnNullData) {
    std::mt19937_64 rng(4);
    int fired = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const ObservationMatrix x(oracle::random_matrix(rng, 40, 2));
        fired += zero_gate(x, 0.05, {.replicates = 99, .seed = static_cast<std::uint64_t>(r)}).significant;
    }
    // Binomial(400, 0.05): mean 20, sd 4.4.
    EXPECT_GE(fired, 6);
    EXPECT_LE(fired, 34);
}

TEST(DefaultMaxChangePoints, Rule) {
    EXPECT_EQ(default_max_change_points(500, 1), 20);
    EXPECT_EQ(default_max_change_points(30, 1), 15);
    EXPECT_EQ(default_max_change_points(100, 10), 5);
}
