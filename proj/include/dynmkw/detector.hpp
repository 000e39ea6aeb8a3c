#pragma once

// End-to-end change-point detection: one entry point for the rank method and
// the three baselines, with a fixed or an estimated number of segments.

#include "dynmkw/binseg.hpp"
#include "dynmkw/costs.hpp"
#include "dynmkw/dp.hpp"
#include "dynmkw/model_select.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace dynmkw {

enum class Method { dynmkw, linear, kernel, binseg };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

struct DetectorOptions {
    Method method = Method::dynmkw;
    std::optional<Index> segments;   // fixed K; unset means estimate it
    Index max_change_points = 0;     // D_max when estimating; 0 picks the default
    Index min_seg_len = 1;
    double alpha = 0.05;             // zero-change gate, or binseg split level
    Index permutations = 999;
    std::uint64_t seed = 0;
    double max_ridge = kDefaultMaxRidge;
    std::size_t memory_budget = kDefaultMemoryBudget;
    double bandwidth = 0.0;          // kernel; 0 picks the median heuristic
    CovarianceScope binseg_scope = CovarianceScope::local;
    unsigned threads = 1;
};

struct Detection {
    Method method = Method::dynmkw;
    Segmentation segmentation;
    // I_{D+1}(n) for D = 0, 1, ... as far as the DP was run.
    std::vector<double> curve;
    std::optional<Index> k_hat;          // set when the count was estimated
    std::optional<double> gate_pvalue;
    bool gated = false;
    bool low_confidence = false;
    std::vector<KinkFit> rss_curve;
    std::optional<double> ridge;         // rank covariance regularization
    std::optional<double> bandwidth;     // kernel bandwidth used
    std::optional<SegmentStatistic> statistic;  // T at the returned boundaries
    bool costs_materialized = false;
    std::vector<SplitTest> split_tests;  // binseg only
};

Detection detect(const ObservationMatrix& x, const DetectorOptions& options);

}  // namespace dynmkw
