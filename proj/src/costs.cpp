#include "dynmkw/costs.hpp"

#include "dynmkw/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynmkw {

namespace {

void check_range(Index n, Index begin, Index end) {
    if (begin < 0 || end > n || begin >= end) {
        throw std::out_of_range("invalid segment [" + std::to_string(begin) + ", " +
                                std::to_string(end) + ") for n = " + std::to_string(n));
    }
}

}  // namespace

LinearCost::LinearCost(const ObservationMatrix& x)
    : sums_(Matrix::Zero(x.rows() + 1, x.dims())), sq_(Eigen::VectorXd::Zero(x.rows() + 1)) {
    for (Index i = 0; i < x.rows(); ++i) {
        sums_.row(i + 1) = sums_.row(i) + x.values().row(i);
        sq_[i + 1] = sq_[i] + x.values().row(i).squaredNorm();
    }
}

double LinearCost::operator()(Index begin, Index end) const {
    const double len = static_cast<double>(end - begin);
    return (sums_.row(end) - sums_.row(begin)).squaredNorm() / len;
}

double LinearCost::within_sse(Index begin, Index end) const {
    return (sq_[end] - sq_[begin]) - (*this)(begin, end);
}

KernelCost::KernelCost(const ObservationMatrix& x, double bandwidth) : bandwidth_(bandwidth) {
    if (!std::isfinite(bandwidth) || !(bandwidth > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be finite and > 0");
    }
    const Index n = x.rows();
    const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
    gram_prefix_ = Matrix::Zero(n + 1, n + 1);
    // Column-major fill: P(i+1, j+1) = P(i, j+1) + P(i+1, j) - P(i, j) + k(i, j).
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double k =
                i == j ? 1.0 : std::exp(scale * (x.values().row(i) - x.values().row(j)).squaredNorm());
            gram_prefix_(i + 1, j + 1) =
                gram_prefix_(i, j + 1) + gram_prefix_(i + 1, j) - gram_prefix_(i, j) + k;
        }
    }
}

double KernelCost::operator()(Index begin, Index end) const {
    const auto& p = gram_prefix_;
    const double block = p(end, end) - p(begin, end) - p(end, begin) + p(begin, begin);
    return block / static_cast<double>(end - begin);
}

double linear_cost(const ObservationMatrix& x, Index begin, Index end) {
    check_range(x.rows(), begin, end);
    const Vector mean = x.values().middleRows(begin, end - begin).colwise().mean().transpose();
    return static_cast<double>(end - begin) * mean.squaredNorm();
}

double kernel_cost(const ObservationMatrix& x, Index begin, Index end, double bandwidth) {
    check_range(x.rows(), begin, end);
    if (!std::isfinite(bandwidth) || !(bandwidth > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be finite and > 0");
    }
    const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
    double total = 0.0;
    for (Index s = begin; s < end; ++s) {
        for (Index t = begin; t < end; ++t) {
            total += std::exp(scale * (x.values().row(s) - x.values().row(t)).squaredNorm());
        }
    }
    return total / static_cast<double>(end - begin);
}

double median_heuristic_bandwidth(const ObservationMatrix& x, std::uint64_t seed, Index max_rows) {
    const Index n = x.rows();
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    if (n > max_rows) {
        Rng rng = make_stream(seed, {0x6b65726eULL});
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(static_cast<std::size_t>(max_rows));
        std::sort(rows.begin(), rows.end());
    }
    std::vector<double> dist;
    dist.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            dist.push_back((x.values().row(rows[a]) - x.values().row(rows[b])).norm());
        }
    }
    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    double median = dist[mid];
    if (dist.size() % 2 == 0) {
        const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    return median > 0.0 ? median : 1.0;
}

std::string_view to_string(CostVariant variant) {
    switch (variant) {
        case CostVariant::rank_mkw: return "rank_mkw";
        case CostVariant::linear_gaussian: return "linear_gaussian";
        case CostVariant::kernel_gaussian: return "kernel_gaussian";
    }
    return "unknown";
}

std::shared_ptr<const SegmentCost> make_cost(const ObservationMatrix& x, const CostKind& kind) {
    switch (kind.variant) {
        case CostVariant::rank_mkw: {
            const RankTable ranks = compute_ranks(x);
            return std::make_shared<RankCost>(ranks, rank_covariance(ranks));
        }
        case CostVariant::linear_gaussian:
            return std::make_shared<LinearCost>(x);
        case CostVariant::kernel_gaussian:
            return std::make_shared<KernelCost>(x, kind.bandwidth);
    }
    throw std::invalid_argument("unknown cost variant");
}

}  // namespace dynmkw
