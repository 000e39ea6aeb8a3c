#include "dynmkw/binseg.hpp"

#include "dynmkw/random.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>

namespace dynmkw {

BinsegResult binseg_vost(const ObservationMatrix& x, const BinsegOptions& options) {
    if (!(options.alpha >= 0.0 && options.alpha < 1.0)) {
        throw std::invalid_argument("alpha must be in [0, 1)");
    }
    if (options.min_seg_len < 1) throw std::invalid_argument("min_seg_len must be >= 1");

    std::optional<RankCovariance> global_cov;
    if (options.scope == CovarianceScope::global) global_cov = rank_covariance(compute_ranks(x));

    BinsegResult result;
    std::vector<Index> boundaries;
    std::vector<std::pair<Index, Index>> stack{{0, x.rows()}};
    while (!stack.empty()) {
        const auto [begin, end] = stack.back();
        stack.pop_back();
        if (end - begin < 2 * options.min_seg_len || end - begin < 2) continue;

        const RankTable ranks = compute_ranks(x.slice(begin, end));
        const RankCovariance cov = global_cov ? *global_cov : rank_covariance(ranks);
        const ScanResult scan = max_single_cp_scan(ranks, cov, options.min_seg_len);
        PermutationOptions perm;
        perm.replicates = options.permutations;
        perm.min_seg_len = options.min_seg_len;
        perm.threads = options.threads;
        perm.seed = derive_seed(options.seed, {static_cast<std::uint64_t>(begin), static_cast<std::uint64_t>(end)});
        const double p = permutation_pvalue(ranks, cov, scan.t_max, perm);

        const Index split = begin + scan.best_boundary;
        result.tests.push_back({begin, end, split, scan.t_max, p});
        if (p <= options.alpha) {
            boundaries.push_back(split);
            // Right half pushed first so the left half is visited first.
            stack.emplace_back(split, end);
            stack.emplace_back(begin, split);
        }
    }
    std::sort(boundaries.begin(), boundaries.end());
    result.segmentation = Segmentation(x.rows(), std::move(boundaries), options.min_seg_len);
    return result;
}

}  // namespace dynmkw
