#include "dynmkw/binseg.hpp"
#include "dynmkw/costs.hpp"
#include "dynmkw/dp.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace dynmkw;

namespace {

Matrix two_step_signal(std::mt19937_64& rng, double noise) {
    Matrix x = noise * oracle::random_matrix(rng, 90, 2);
    x.middleRows(30, 30).col(0).array() += 1.0;
    x.bottomRows(30).col(1).array() += 1.0;
    return x;
}

}  // namespace

TEST(LinearCost, ConstantSegment) {
    Matrix x(6, 2);
    x.col(0).setConstant(2.0);
    x.col(1).setConstant(-3.0);
    const ObservationMatrix obs(x);
    EXPECT_DOUBLE_EQ(linear_cost(obs, 1, 5), 4 * 13.0);
    EXPECT_DOUBLE_EQ(LinearCost(obs)(1, 5), 4 * 13.0);
}

TEST(LinearCost, PrefixMatchesDirectAndSseIdentity) {
    std::mt19937_64 rng(1);
    const ObservationMatrix x(oracle::random_matrix(rng, 40, 3));
    const LinearCost cost(x);
    std::uniform_int_distribution<Index> pick(0, 40);
    for (int rep = 0; rep < 200; ++rep) {
        Index a = pick(rng), b = pick(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        EXPECT_NEAR(cost(a, b), linear_cost(x, a, b), 1e-10);
        const Matrix seg = x.values().middleRows(a, b - a);
        const double sse = (seg.rowwise() - seg.colwise().mean()).squaredNorm();
        EXPECT_NEAR(cost.within_sse(a, b), sse, 1e-9);
    }
    // Total SSE of a segmentation = sum ||x||^2 - sum of gains.
    const Segmentation s(40, {7, 19, 33});
    double gains = 0.0, direct = 0.0;
    for (auto [b, e] : s.ranges()) {
        gains += cost(b, e);
        const Matrix seg = x.values().middleRows(b, e - b);
        direct += (seg.rowwise() - seg.colwise().mean()).squaredNorm();
    }
    EXPECT_NEAR(x.values().squaredNorm() - gains, direct, 1e-9);
}

TEST(LinearCost, DpRecoversNoiselessSteps) {
    Matrix x = Matrix::Zero(24, 1);
    x.middleRows(8, 8).setConstant(2.0);
    const ObservationMatrix obs(x);
    const CostProvider provider(std::make_shared<LinearCost>(obs), 1);
    const DpTable t = solve(provider, 3);
    const auto brute = oracle::brute_force([&](Index b, Index e) { return provider(b, e); }, 24, 3);
    EXPECT_EQ(backtrack(t, 3).boundaries(), (std::vector<Index>{8, 16}));
    EXPECT_EQ(brute.boundaries, (std::vector<Index>{8, 16}));
}

TEST(KernelCost, TrivialSegments) {
    std::mt19937_64 rng(2);
    Matrix x = oracle::random_matrix(rng, 5, 2);
    x.row(3) = x.row(2);
    const ObservationMatrix obs(x);
    EXPECT_DOUBLE_EQ(kernel_cost(obs, 0, 1, 0.7), 1.0);
    EXPECT_DOUBLE_EQ(kernel_cost(obs, 2, 4, 0.7), 2.0);
    const KernelCost cost(obs, 0.7);
    EXPECT_NEAR(cost(0, 1), 1.0, 1e-12);
    EXPECT_NEAR(cost(2, 4), 2.0, 1e-12);
}

TEST(KernelCost, PrefixTableMatchesDirectDoubleSum) {
    std::mt19937_64 rng(3);
    const ObservationMatrix x(oracle::random_matrix(rng, 30, 3));
    const KernelCost cost(x, 1.3);
    for (Index b = 0; b + 5 <= 30; b += 5) {
        EXPECT_NEAR(cost(b, b + 5), kernel_cost(x, b, b + 5, 1.3), 1e-10);
    }
    EXPECT_NEAR(cost(3, 29), kernel_cost(x, 3, 29, 1.3), 1e-9);
}

TEST(KernelCost, RejectsBadBandwidth) {
    std::mt19937_64 rng(4);
    const ObservationMatrix x(oracle::random_matrix(rng, 5, 1));
    EXPECT_THROW(KernelCost(x, 0.0), std::invalid_argument);
    EXPECT_THROW(KernelCost(x, INFINITY), std::invalid_argument);
    EXPECT_THROW(kernel_cost(x, 0, 2, -1.0), std::invalid_argument);
}

TEST(KernelCost, HugeBandwidthMakesEverySegmentationEqual) {
    std::mt19937_64 rng(5);
    const ObservationMatrix x(oracle::random_matrix(rng, 40, 2));
    const double scale = median_heuristic_bandwidth(x, 0);
    const CostProvider provider(std::make_shared<KernelCost>(x, 1e6 * scale), 1);
    const DpTable t = solve(provider, 5);
    for (Index k = 1; k <= 5; ++k) EXPECT_NEAR(t.optimum(k), 40.0, 1e-6);
}

TEST(MedianHeuristic, SmallCases) {
    Matrix three(3, 1);
    three << 0, 1, 3;  // distances 1, 3, 2
    EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(ObservationMatrix(three), 0), 2.0);
    Matrix four(4, 1);
    four << 0, 1, 3, 6;  // 1, 2, 3, 3, 5, 6
    EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(ObservationMatrix(four), 0), 3.0);
    EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(ObservationMatrix(Matrix::Zero(4, 2)), 0), 1.0);
}

TEST(MedianHeuristic, SubsampleIsSeeded) {
    std::mt19937_64 rng(6);
    const ObservationMatrix x(oracle::random_matrix(rng, 700, 2));
    EXPECT_EQ(median_heuristic_bandwidth(x, 3), median_heuristic_bandwidth(x, 3));
}

TEST(CostVariants, DpMatchesBruteForce) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<Index> size(4, 12), dims(1, 3), segs(1, 4);
    for (CostVariant v : {CostVariant::rank_mkw, CostVariant::linear_gaussian, CostVariant::kernel_gaussian}) {
        for (int rep = 0; rep < 30; ++rep) {
            const Index n = size(rng), k = std::min(segs(rng), n);
            const ObservationMatrix x(oracle::random_matrix(rng, n, dims(rng)));
            CostKind kind{v, median_heuristic_bandwidth(x, 1)};
            const CostProvider provider(make_cost(x, kind), 1);
            const DpTable t = solve(provider, k);
            const auto brute = oracle::brute_force([&](Index b, Index e) { return provider(b, e); }, n, k);
            ASSERT_NEAR(t.optimum(k), brute.value, 1e-9) << to_string(v);
            ASSERT_EQ(backtrack(t, k).boundaries(), brute.boundaries) << to_string(v);
        }
    }
}

TEST(Binseg, NoiselessTwoSteps) {
    std::mt19937_64 rng(8);
    const ObservationMatrix x(two_step_signal(rng, 0.0));
    for (double alpha : {0.01, 0.05}) {
        const BinsegResult r = binseg_vost(x, {.alpha = alpha, .permutations = 199, .seed = 3});
        EXPECT_EQ(r.segmentation.boundaries(), (std::vector<Index>{30, 60}));
    }
}

TEST(Binseg, PureNoiseRarelySplits) {
    std::mt19937_64 rng(9);
    int empty = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const ObservationMatrix x(oracle::random_matrix(rng, 50, 2));
        const BinsegResult r = binseg_vost(
            x, {.alpha = 0.01, .permutations = 99, .seed = static_cast<std::uint64_t>(rep)});
        empty += r.segmentation.boundaries().empty();
    }
    EXPECT_GE(empty, 95);
}

TEST(Binseg, ShortSegmentsAreNeverSplit) {
    Matrix x(3, 1);
    x << 0, 0, 10;
    const BinsegResult r = binseg_vost(ObservationMatrix(x), {.alpha = 0.5, .permutations = 9, .min_seg_len = 2});
    EXPECT_TRUE(r.segmentation.boundaries().empty());
    EXPECT_TRUE(r.tests.empty());
}

TEST(Binseg, SmallerAlphaGivesSubset) {
    std::mt19937_64 rng(10);
    for (int rep = 0; rep < 20; ++rep) {
        const ObservationMatrix x(two_step_signal(rng, 0.8));
        const auto strict = binseg_vost(x, {.alpha = 0.01, .permutations = 199, .seed = 4}).segmentation;
        const auto loose = binseg_vost(x, {.alpha = 0.05, .permutations = 199, .seed = 4}).segmentation;
        for (Index b : strict.boundaries()) {
            EXPECT_TRUE(std::find(loose.boundaries().begin(), loose.boundaries().end(), b) !=
                        loose.boundaries().end());
        }
    }
}

TEST(Binseg, GlobalCovarianceScope) {
    std::mt19937_64 rng(11);
    const ObservationMatrix x(two_step_signal(rng, 0.05));
    const BinsegResult r = binseg_vost(
        x, {.alpha = 0.05, .permutations = 199, .seed = 2, .scope = CovarianceScope::global});
    EXPECT_EQ(r.segmentation.boundaries(), (std::vector<Index>{30, 60}));
    EXPECT_GE(r.tests.size(), 3u);
}

TEST(Binseg, DeterministicGivenSeed) {
    std::mt19937_64 rng(12);
    const ObservationMatrix x(two_step_signal(rng, 1.0));
    const auto a = binseg_vost(x, {.alpha = 0.05, .permutations = 99, .seed = 8});
    const auto b = binseg_vost(x, {.alpha = 0.05, .permutations = 99, .seed = 8});
    EXPECT_EQ(a.segmentation, b.segmentation);
    ASSERT_EQ(a.tests.size(), b.tests.size());
    for (std::size_t i = 0; i < a.tests.size(); ++i) EXPECT_EQ(a.tests[i].pvalue, b.tests[i].pvalue);
}
