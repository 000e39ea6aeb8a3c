#include "dynmkw/segment_stat.hpp"

#include "dynmkw/distributions.hpp"
#include "dynmkw/parallel.hpp"
#include "dynmkw/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dynmkw {

namespace {

void check_range(Index n, Index begin, Index end) {
    if (begin < 0 || end > n || begin >= end) {
        throw std::out_of_range("invalid segment [" + std::to_string(begin) + ", " +
                                std::to_string(end) + ") for n = " + std::to_string(n));
    }
}

}  // namespace

Segmentation::Segmentation(Index n, std::vector<Index> boundaries, Index min_seg_len)
    : n_(n), boundaries_(std::move(boundaries)) {
    if (n < 1) throw std::invalid_argument("segmentation length must be positive");
    if (min_seg_len < 1) throw std::invalid_argument("min_seg_len must be >= 1");
    Index previous = 0;
    for (Index b : boundaries_) {
        if (b - previous < min_seg_len) {
            throw std::invalid_argument("boundary " + std::to_string(b) +
                                        " leaves a segment shorter than " +
                                        std::to_string(min_seg_len));
        }
        previous = b;
    }
    if (n - previous < min_seg_len) {
        throw std::invalid_argument("last segment shorter than " + std::to_string(min_seg_len) +
                                    " (n = " + std::to_string(n) + ")");
    }
}

std::vector<std::pair<Index, Index>> Segmentation::ranges() const {
    std::vector<std::pair<Index, Index>> out;
    out.reserve(boundaries_.size() + 1);
    Index begin = 0;
    for (Index b : boundaries_) {
        out.emplace_back(begin, b);
        begin = b;
    }
    out.emplace_back(begin, n_);
    return out;
}

Vector mean_rank_vector(const RankTable& ranks, Index begin, Index end) {
    check_range(ranks.rows(), begin, end);
    const double len = static_cast<double>(end - begin);
    const double half_n = 0.5 * static_cast<double>(ranks.rows());
    return (ranks.rank_sum(begin, end) / len).array() - half_n;
}

double segment_cost(const RankTable& ranks, const RankCovariance& cov, Index begin, Index end) {
    const Vector v = mean_rank_vector(ranks, begin, end);
    return static_cast<double>(end - begin) * cov.quadratic_form(v);
}

SegmentStatistic statistic_t(const RankTable& ranks, const RankCovariance& cov,
                             const Segmentation& segmentation) {
    if (segmentation.length() != ranks.rows()) {
        throw std::invalid_argument("segmentation length does not match the data");
    }
    SegmentStatistic stat;
    double total = 0.0;
    for (auto [begin, end] : segmentation.ranges()) {
        const double c = segment_cost(ranks, cov, begin, end);
        stat.per_segment_costs.push_back(c);
        total += c;
    }
    const double n = static_cast<double>(ranks.rows());
    stat.value = total / (n * n);
    stat.df = (segmentation.segments() - 1) * ranks.dims();
    return stat;
}

double fixed_boundary_pvalue(const SegmentStatistic& stat) {
    if (stat.df < 1) throw std::invalid_argument("test undefined for a single group");
    return chi2_sf(stat.value, static_cast<double>(stat.df));
}

WhitenedRanks::WhitenedRanks(const RankTable& ranks, const RankCovariance& cov) {
    const auto lower = cov.factor().triangularView<Eigen::Lower>();
    prefix_ = lower.solve(ranks.prefix.transpose());
    center_ = lower.solve(Vector::Constant(ranks.dims(), 0.5 * static_cast<double>(ranks.rows())));
}

namespace {

ScanResult scan(const WhitenedRanks& w, Index min_seg_len) {
    const Index n = w.rows();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    ScanResult best{0, -1.0};
    for (Index b = min_seg_len; b <= n - min_seg_len; ++b) {
        const double t = (w.cost(0, b) + w.cost(b, n)) / n2;
        if (t > best.t_max) best = {b, t};
    }
    return best;
}

void check_scan_length(Index n, Index min_seg_len) {
    if (min_seg_len < 1) throw std::invalid_argument("min_seg_len must be >= 1");
    if (n < 2 * min_seg_len) {
        throw std::invalid_argument("series of length " + std::to_string(n) +
                                    " too short for a single change-point scan with min_seg_len " +
                                    std::to_string(min_seg_len));
    }
}

}  // namespace

ScanResult max_single_cp_scan(const RankTable& ranks, const RankCovariance& cov, Index min_seg_len) {
    check_scan_length(ranks.rows(), min_seg_len);
    return scan(WhitenedRanks(ranks, cov), min_seg_len);
}

double permutation_pvalue(const RankTable& ranks, const RankCovariance& cov, double t_max,
                          const PermutationOptions& options) {
    if (options.replicates < 1) throw std::invalid_argument("permutation test needs B >= 1");
    check_scan_length(ranks.rows(), options.min_seg_len);
    const Index n = ranks.rows();
    const auto replicates = static_cast<std::size_t>(options.replicates);
    std::vector<char> exceeds(replicates, 0);

    parallel_for(replicates, options.threads, [&](std::size_t b) {
        Rng rng = make_stream(options.seed, {0x7065726dULL, static_cast<std::uint64_t>(b)});
        std::vector<Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        Matrix shuffled(n, ranks.dims());
        for (Index i = 0; i < n; ++i) shuffled.row(i) = ranks.ranks.row(order[static_cast<std::size_t>(i)]);
        const RankTable permuted = make_rank_table(std::move(shuffled));
        exceeds[b] = scan(WhitenedRanks(permuted, cov), options.min_seg_len).t_max >= t_max;
    });

    const auto count = std::count(exceeds.begin(), exceeds.end(), char{1});
    return static_cast<double>(1 + count) / static_cast<double>(options.replicates + 1);
}

double permutation_pvalue(const ObservationMatrix& x, double t_max,
                          const PermutationOptions& options) {
    const RankTable ranks = compute_ranks(x);
    return permutation_pvalue(ranks, rank_covariance(ranks), t_max, options);
}

}  // namespace dynmkw
