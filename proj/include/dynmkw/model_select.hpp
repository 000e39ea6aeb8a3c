#pragma once

// Number of change-points from the curve D -> I_{D+1}(n), D = 0..D_max.
//
// The curve grows fast up to the true count and slowly after it. For every
// candidate kink c in [1, D_max - 1] two OLS lines are fitted, one on
// {D <= c} and one on {D >= c} (the kink point belongs to both), and the
// candidate with the smallest total RSS wins.

#include "dynmkw/segment_stat.hpp"

#include <span>
#include <vector>

namespace dynmkw {

struct KinkFit {
    Index change_points = 0;
    double rss = 0.0;
};

struct SlopeSelection {
    Index change_points = 0;
    std::vector<KinkFit> rss_curve;
    // A single line fits as well as the best two-line model: no visible kink.
    bool low_confidence = false;
};

// curve[d] = I_{d+1}(n). Needs at least 4 points. RSS values within
// 1e-12 * total sum of squares of the best count as ties (smallest wins).
SlopeSelection select_change_count(std::span<const double> curve);

struct GateResult {
    bool significant = false;
    double pvalue = 1.0;
    ScanResult scan;
};

// Zero-change gate: single change-point scan plus permutation p-value;
// significant iff p <= alpha.
GateResult zero_gate(const RankTable& ranks, const RankCovariance& cov, double alpha,
                     const PermutationOptions& options);
GateResult zero_gate(const ObservationMatrix& x, double alpha, const PermutationOptions& options);

// min(20, floor(n / (2 * min_seg_len))).
Index default_max_change_points(Index n, Index min_seg_len);

}  // namespace dynmkw
