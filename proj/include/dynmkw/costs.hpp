#pragma once

// Additive segment gains shared by the DP maximizer. Every variant returns a
// gain for rows [begin, end); the best segmentation maximizes the sum.

#include "dynmkw/segment_stat.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace dynmkw {

class SegmentCost {
public:
    virtual ~SegmentCost() = default;
    virtual Index rows() const = 0;
    virtual double operator()(Index begin, Index end) const = 0;
};

// Delta(begin:end) of the rank statistic.
class RankCost final : public SegmentCost {
public:
    RankCost(const RankTable& ranks, const RankCovariance& cov) : whitened_(ranks, cov) {}
    Index rows() const override { return whitened_.rows(); }
    double operator()(Index begin, Index end) const override { return whitened_.cost(begin, end); }

private:
    WhitenedRanks whitened_;
};

// Gaussian least squares: len * ||mean(X[begin:end])||^2. Maximizing the sum
// of gains minimizes the total within-segment sum of squares.
class LinearCost final : public SegmentCost {
public:
    explicit LinearCost(const ObservationMatrix& x);
    Index rows() const override { return sums_.rows() - 1; }
    double operator()(Index begin, Index end) const override;
    // Within-segment sum of squared deviations from the segment mean.
    double within_sse(Index begin, Index end) const;

private:
    Matrix sums_;            // (n+1) x L prefix sums of X
    Eigen::VectorXd sq_;     // (n+1) prefix sums of ||X_i||^2
};

// Gaussian-kernel intra-segment scatter: (1/len) sum_{s,t} k(X_s, X_t) with
// k(x, y) = exp(-||x - y||^2 / (2 h^2)). Holds an (n+1)^2 table of 2-D
// prefix sums of the Gram matrix, so queries are O(1).
class KernelCost final : public SegmentCost {
public:
    KernelCost(const ObservationMatrix& x, double bandwidth);
    Index rows() const override { return gram_prefix_.rows() - 1; }
    double operator()(Index begin, Index end) const override;
    double bandwidth() const { return bandwidth_; }

private:
    Matrix gram_prefix_;
    double bandwidth_;
};

double linear_cost(const ObservationMatrix& x, Index begin, Index end);
double kernel_cost(const ObservationMatrix& x, Index begin, Index end, double bandwidth);

// Median pairwise Euclidean distance over at most max_rows rows sampled
// without replacement. Falls back to 1 when the median distance is zero.
double median_heuristic_bandwidth(const ObservationMatrix& x, std::uint64_t seed,
                                  Index max_rows = 500);

enum class CostVariant { rank_mkw, linear_gaussian, kernel_gaussian };

struct CostKind {
    CostVariant variant = CostVariant::rank_mkw;
    double bandwidth = 0.0;  // kernel only; must be finite and > 0
};

std::string_view to_string(CostVariant variant);

// Builds the gain for a variant. The rank variant computes its own ranks and
// covariance; use RankCost directly to share them with other steps.
std::shared_ptr<const SegmentCost> make_cost(const ObservationMatrix& x, const CostKind& kind);

}  // namespace dynmkw
