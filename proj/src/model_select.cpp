#include "dynmkw/model_select.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dynmkw {

namespace {

// Residual sum of squares of the OLS line through (x, y[x]) for x in [first, last].
double line_rss(std::span<const double> y, std::size_t first, std::size_t last) {
    const double count = static_cast<double>(last - first + 1);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        mx += static_cast<double>(i);
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        const double dx = static_cast<double>(i) - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    return std::max(0.0, syy - sxy * sxy / sxx);
}

}  // namespace

SlopeSelection select_change_count(std::span<const double> curve) {
    if (curve.size() < 4) {
        throw std::invalid_argument("slope heuristic needs at least 4 curve points");
    }
    const std::size_t last = curve.size() - 1;
    SlopeSelection out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 1; c < last; ++c) {
        const double rss = line_rss(curve, 0, c) + line_rss(curve, c, last);
        out.rss_curve.push_back({static_cast<Index>(c), rss});
        best = std::min(best, rss);
    }

    double mean = 0.0;
    for (double v : curve) mean += v;
    mean /= static_cast<double>(curve.size());
    double tss = 0.0;
    for (double v : curve) tss += (v - mean) * (v - mean);

    const double tie = best + 1e-12 * tss;
    for (const KinkFit& fit : out.rss_curve) {
        if (fit.rss <= tie) {
            out.change_points = fit.change_points;
            break;
        }
    }
    out.low_confidence = line_rss(curve, 0, last) - best <= 1e-9 * tss;
    return out;
}

GateResult zero_gate(const RankTable& ranks, const RankCovariance& cov, double alpha,
                     const PermutationOptions& options) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in [0, 1)");
    GateResult gate;
    gate.scan = max_single_cp_scan(ranks, cov, options.min_seg_len);
    gate.pvalue = permutation_pvalue(ranks, cov, gate.scan.t_max, options);
    gate.significant = gate.pvalue <= alpha;
    return gate;
}

GateResult zero_gate(const ObservationMatrix& x, double alpha, const PermutationOptions& options) {
    const RankTable ranks = compute_ranks(x);
    return zero_gate(ranks, rank_covariance(ranks), alpha, options);
}

Index default_max_change_points(Index n, Index min_seg_len) {
    return std::min<Index>(20, n / (2 * min_seg_len));
}

}  // namespace dynmkw
