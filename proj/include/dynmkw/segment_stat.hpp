#pragma once

// Multivariate Kruskal-Wallis segment statistic.
//
// Index conventions: rows are 0-based and segments are half-open row ranges
// [begin, end). A boundary b is the number of rows before a change, which is
// also the 1-based index of the last row of the segment it closes.

#include "dynmkw/ranks.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace dynmkw {

// Ordered change-points of a length-n series. Boundaries are strictly
// increasing in [1, n-1]; segment k covers rows [b_k, b_{k+1}) with b_0 = 0
// and b_K = n. Every segment holds at least min_seg_len rows.
class Segmentation {
public:
    Segmentation() = default;
    Segmentation(Index n, std::vector<Index> boundaries, Index min_seg_len = 1);

    Index length() const { return n_; }
    const std::vector<Index>& boundaries() const { return boundaries_; }
    Index segments() const { return static_cast<Index>(boundaries_.size()) + 1; }
    // [begin, end) row ranges, one per segment.
    std::vector<std::pair<Index, Index>> ranges() const;

    bool operator==(const Segmentation&) const = default;

private:
    Index n_ = 0;
    std::vector<Index> boundaries_;
};

struct SegmentStatistic {
    double value = 0.0;  // T
    Index df = 0;        // (K - 1) * L
    std::vector<double> per_segment_costs;
};

// Mean rank over rows [begin, end) minus n/2, per coordinate. O(L).
Vector mean_rank_vector(const RankTable& ranks, Index begin, Index end);

// Delta(begin:end) = len * v' Sigma^{-1} v with v = mean_rank_vector.
double segment_cost(const RankTable& ranks, const RankCovariance& cov, Index begin, Index end);

SegmentStatistic statistic_t(const RankTable& ranks, const RankCovariance& cov,
                             const Segmentation& segmentation);

// Survival of chi^2(df) at T; the asymptotic null law for fixed boundaries.
double fixed_boundary_pvalue(const SegmentStatistic& stat);

// Rank sums pre-multiplied by the inverse covariance factor, so a segment
// cost is an O(L) norm instead of an O(L^2) triangular solve.
class WhitenedRanks {
public:
    WhitenedRanks(const RankTable& ranks, const RankCovariance& cov);

    Index rows() const { return prefix_.cols() - 1; }
    double cost(Index begin, Index end) const {
        const double len = static_cast<double>(end - begin);
        return ((prefix_.col(end) - prefix_.col(begin)) - len * center_).squaredNorm() / len;
    }

private:
    Matrix prefix_;  // L x (n+1)
    Vector center_;  // F^{-1} (n/2) 1
};

struct ScanResult {
    Index best_boundary = 0;
    double t_max = 0.0;
};

// Exhaustive single change-point scan over b in [min_seg_len, n - min_seg_len].
// Ties go to the smallest b.
ScanResult max_single_cp_scan(const RankTable& ranks, const RankCovariance& cov,
                              Index min_seg_len = 1);

struct PermutationOptions {
    Index replicates = 999;
    std::uint64_t seed = 0;
    Index min_seg_len = 1;
    unsigned threads = 1;
};

// (1 + #{b : T_max^(b) >= t_max}) / (B + 1), permuting whole rows.
double permutation_pvalue(const ObservationMatrix& x, double t_max,
                          const PermutationOptions& options);

// Same test on precomputed ranks. Row permutations leave Sigma-hat unchanged,
// so the covariance is reused and only the rank rows are shuffled.
double permutation_pvalue(const RankTable& ranks, const RankCovariance& cov, double t_max,
                          const PermutationOptions& options);

}  // namespace dynmkw
