#include "dynmkw/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dynmkw {

CostProvider::CostProvider(std::shared_ptr<const SegmentCost> cost, Index min_seg_len,
                           std::size_t memory_budget)
    : cost_(std::move(cost)), n_(cost_->rows()), min_seg_len_(min_seg_len) {
    if (min_seg_len < 1) throw std::invalid_argument("min_seg_len must be >= 1");
    const auto n = static_cast<std::size_t>(n_);
    if (n * n * sizeof(double) > memory_budget) return;

    table_.resize(n * (n + 1) / 2);
    for (Index end = 1; end <= n_; ++end) {
        double* col = table_.data() + offset(end);
        for (Index begin = 0; begin < end; ++begin) col[begin] = (*cost_)(begin, end);
    }
}

CostProvider precompute_costs(const RankTable& ranks, const RankCovariance& cov,
                              Index min_seg_len, std::size_t memory_budget) {
    return CostProvider(std::make_shared<RankCost>(ranks, cov), min_seg_len, memory_budget);
}

DpTable solve(const CostProvider& provider, Index k_max) {
    const Index n = provider.rows();
    const Index m = provider.min_seg_len();
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (n < k_max * m) {
        throw std::invalid_argument("infeasible: n = " + std::to_string(n) + " < k_max (" +
                                    std::to_string(k_max) + ") * min_seg_len (" +
                                    std::to_string(m) + ")");
    }

    constexpr double kNone = -std::numeric_limits<double>::infinity();
    // Candidates this close to the running best count as ties (smallest b wins),
    // so rounding does not decide between mathematically equal segmentations.
    constexpr double kTieTolerance = 1e-12;
    DpTable t;
    t.n = n;
    t.k_max = k_max;
    t.min_seg_len = m;
    t.values = Matrix::Constant(k_max, n + 1, kNone);
    t.back.setConstant(k_max, n + 1, -1);

    // One pass over segment ends; each cost column is read once for every k.
    std::vector<std::vector<double>> best_row(static_cast<std::size_t>(k_max),
                                              std::vector<double>(static_cast<std::size_t>(n + 1), kNone));
    std::vector<double> scratch(provider.materialized() ? 0 : static_cast<std::size_t>(n + 1));
    for (Index p = m; p <= n; ++p) {
        const double* col;
        if (provider.materialized()) {
            col = provider.column(p);
        } else {
            for (Index b = 0; b <= p - m; ++b) scratch[static_cast<std::size_t>(b)] = provider(b, p);
            col = scratch.data();
        }
        best_row[0][static_cast<std::size_t>(p)] = col[0];
        t.back(0, p) = 0;
        const Index last_b = p - m;
        for (Index k = 2; k <= k_max && k * m <= p; ++k) {
            const double* previous = best_row[static_cast<std::size_t>(k - 2)].data();
            double best = kNone;
            double bar = kNone;
            Index arg = -1;
            for (Index b = (k - 1) * m; b <= last_b; ++b) {
                const double v = previous[b] + col[b];
                if (v > bar) {
                    best = v;
                    bar = v + kTieTolerance * std::abs(v);
                    arg = b;
                }
            }
            best_row[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p)] = best;
            t.back(k - 1, p) = arg;
        }
    }
    for (Index k = 0; k < k_max; ++k) {
        const auto& row = best_row[static_cast<std::size_t>(k)];
        for (Index p = 0; p <= n; ++p) t.values(k, p) = row[static_cast<std::size_t>(p)];
    }
    return t;
}

Segmentation backtrack(const DpTable& table, Index k) {
    if (k < 1 || k > table.k_max) {
        throw std::out_of_range("K = " + std::to_string(k) + " outside [1, " +
                                std::to_string(table.k_max) + "]");
    }
    std::vector<Index> boundaries;
    Index p = table.n;
    for (Index row = k; row >= 2; --row) {
        p = table.back(row - 1, p);
        boundaries.push_back(p);
    }
    std::reverse(boundaries.begin(), boundaries.end());
    return Segmentation(table.n, std::move(boundaries), table.min_seg_len);
}

}  // namespace dynmkw
