#include "dynmkw/detector.hpp"

#include <stdexcept>
#include <string>

namespace dynmkw {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::dynmkw: return "dynmkw";
        case Method::linear: return "linear";
        case Method::kernel: return "kernel";
        case Method::binseg: return "binseg";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::dynmkw, Method::linear, Method::kernel, Method::binseg}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

namespace {

// Runs the DP over the given provider and fills curve, k_hat and segmentation.
void segment_with_dp(const CostProvider& provider, const DetectorOptions& options,
                     Detection& out) {
    const Index n = provider.rows();
    out.costs_materialized = provider.materialized();
    if (options.segments) {
        const DpTable table = solve(provider, *options.segments);
        for (Index k = 1; k <= table.k_max; ++k) out.curve.push_back(table.optimum(k));
        out.segmentation = backtrack(table, *options.segments);
        return;
    }
    const Index d_max = options.max_change_points > 0
                            ? options.max_change_points
                            : default_max_change_points(n, options.min_seg_len);
    if (d_max < 3) {
        throw std::invalid_argument("series of length " + std::to_string(n) +
                                    " too short to estimate the number of change-points "
                                    "(needs D_max >= 3)");
    }
    const DpTable table = solve(provider, d_max + 1);
    for (Index k = 1; k <= table.k_max; ++k) out.curve.push_back(table.optimum(k));
    const SlopeSelection selection = select_change_count(out.curve);
    out.k_hat = selection.change_points;
    out.rss_curve = selection.rss_curve;
    out.low_confidence = selection.low_confidence;
    out.segmentation = backtrack(table, selection.change_points + 1);
}

}  // namespace

Detection detect(const ObservationMatrix& x, const DetectorOptions& options) {
    if (options.segments && *options.segments < 1) {
        throw std::invalid_argument("number of segments must be >= 1");
    }
    Detection out;
    out.method = options.method;
    const Index n = x.rows();

    switch (options.method) {
        case Method::dynmkw: {
            const RankTable ranks = compute_ranks(x);
            const RankCovariance cov = rank_covariance(ranks, options.max_ridge);
            out.ridge = cov.ridge();
            if (!options.segments) {
                PermutationOptions perm;
                perm.replicates = options.permutations;
                perm.seed = options.seed;
                perm.min_seg_len = options.min_seg_len;
                perm.threads = options.threads;
                const GateResult gate = zero_gate(ranks, cov, options.alpha, perm);
                out.gate_pvalue = gate.pvalue;
                if (!gate.significant) {
                    out.gated = true;
                    out.k_hat = 0;
                    out.segmentation = Segmentation(n, {}, options.min_seg_len);
                    out.statistic = statistic_t(ranks, cov, out.segmentation);
                    return out;
                }
            }
            segment_with_dp(precompute_costs(ranks, cov, options.min_seg_len, options.memory_budget),
                            options, out);
            out.statistic = statistic_t(ranks, cov, out.segmentation);
            return out;
        }
        case Method::linear:
            segment_with_dp(CostProvider(std::make_shared<LinearCost>(x), options.min_seg_len,
                                         options.memory_budget),
                            options, out);
            return out;
        case Method::kernel: {
            const double h = options.bandwidth > 0.0 ? options.bandwidth
                                                     : median_heuristic_bandwidth(x, options.seed);
            out.bandwidth = h;
            segment_with_dp(CostProvider(std::make_shared<KernelCost>(x, h), options.min_seg_len,
                                         options.memory_budget),
                            options, out);
            return out;
        }
        case Method::binseg: {
            if (options.segments) {
                throw std::invalid_argument("binseg does not take a fixed number of segments");
            }
            BinsegOptions bs;
            bs.alpha = options.alpha;
            bs.permutations = options.permutations;
            bs.min_seg_len = options.min_seg_len;
            bs.seed = options.seed;
            bs.scope = options.binseg_scope;
            bs.threads = options.threads;
            BinsegResult result = binseg_vost(x, bs);
            out.segmentation = std::move(result.segmentation);
            out.split_tests = std::move(result.tests);
            out.k_hat = static_cast<Index>(out.segmentation.boundaries().size());
            return out;
        }
    }
    throw std::invalid_argument("unknown method");
}

}  // namespace dynmkw
