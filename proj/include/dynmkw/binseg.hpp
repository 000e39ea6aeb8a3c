#pragma once

// Greedy hierarchical segmentation: test the current segment for a single
// change with the rank scan + permutation p-value, split when p <= alpha,
// and recurse into both halves.

#include "dynmkw/segment_stat.hpp"

#include <cstdint>
#include <vector>

namespace dynmkw {

// Where the rank covariance of a sub-segment test comes from. Ranks are
// always recomputed inside the segment.
enum class CovarianceScope {
    local,   // Sigma-hat re-estimated from the segment's own ranks
    global,  // Sigma-hat of the full series
};

struct BinsegOptions {
    double alpha = 0.05;
    Index permutations = 999;
    Index min_seg_len = 1;
    std::uint64_t seed = 0;
    CovarianceScope scope = CovarianceScope::local;
    unsigned threads = 1;
};

struct SplitTest {
    Index begin = 0;
    Index end = 0;
    Index boundary = 0;  // absolute row count before the candidate change
    double t_max = 0.0;
    double pvalue = 1.0;
};

struct BinsegResult {
    Segmentation segmentation;
    std::vector<SplitTest> tests;  // every test run, in visiting order
};

// Each segment's permutation stream is keyed by (seed, begin, end), so the
// splits found at a smaller alpha are a subset of those at a larger one.
BinsegResult binseg_vost(const ObservationMatrix& x, const BinsegOptions& options);

}  // namespace dynmkw
