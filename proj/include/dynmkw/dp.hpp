#pragma once

// Exact maximization of an additive segmentation gain by dynamic programming:
//   I_1(p) = Delta(0:p),
//   I_K(p) = max_b { I_{K-1}(b) + Delta(b:p) },
// in O(K_max * n^2) gain lookups.

#include "dynmkw/costs.hpp"

#include <cstddef>
#include <memory>

namespace dynmkw {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

// Gain lookups for the DP. Materializes every Delta(b:e) into a packed
// triangle (n(n+1)/2 doubles, grouped by segment end) when n^2 * 8 bytes fits
// the budget; otherwise forwards each query to the underlying gain. Both
// paths return bit-identical values.
class CostProvider {
public:
    CostProvider(std::shared_ptr<const SegmentCost> cost, Index min_seg_len,
                 std::size_t memory_budget = kDefaultMemoryBudget);

    Index rows() const { return n_; }
    Index min_seg_len() const { return min_seg_len_; }
    bool materialized() const { return !table_.empty(); }
    // Bytes held by the materialized triangle (0 when computing on demand).
    std::size_t table_bytes() const { return table_.size() * sizeof(double); }

    double operator()(Index begin, Index end) const {
        return materialized() ? table_[offset(end) + static_cast<std::size_t>(begin)]
                              : (*cost_)(begin, end);
    }

    // Gains Delta(b:end) for b = 0..end-1, contiguous; materialized only.
    const double* column(Index end) const { return table_.data() + offset(end); }

private:
    static std::size_t offset(Index end) {
        const auto e = static_cast<std::size_t>(end);
        return e * (e - 1) / 2;
    }

    std::shared_ptr<const SegmentCost> cost_;
    Index n_;
    Index min_seg_len_;
    std::vector<double> table_;
};

// Rank-statistic provider.
CostProvider precompute_costs(const RankTable& ranks, const RankCovariance& cov,
                              Index min_seg_len = 1,
                              std::size_t memory_budget = kDefaultMemoryBudget);

struct DpTable {
    Index n = 0;
    Index k_max = 0;
    Index min_seg_len = 1;
    Matrix values;                      // values(K-1, p) = I_K(p); -inf where infeasible
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> back;  // argmax b per cell, -1 if none

    // I_K(n) for K = 1..k_max.
    double optimum(Index k) const { return values(k - 1, n); }
};

// Throws std::invalid_argument when n < k_max * min_seg_len.
DpTable solve(const CostProvider& provider, Index k_max);

// Boundaries achieving I_K(n). Throws std::out_of_range for K outside [1, k_max].
Segmentation backtrack(const DpTable& table, Index k);

}  // namespace dynmkw
