#include "dynmkw/ranks.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynmkw {

namespace {

void midranks(const Eigen::Ref<const Vector>& column, Eigen::Ref<Vector> out) {
    const Index n = column.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return column[a] < column[b]; });
    Index first = 0;
    while (first < n) {
        Index last = first;
        while (last + 1 < n && column[order[last + 1]] == column[order[first]]) ++last;
        // Positions first..last (0-based) are tied; 1-based average is exact in binary.
        const double rank = 0.5 * static_cast<double>(first + last + 2);
        for (Index k = first; k <= last; ++k) out[order[k]] = rank;
        first = last + 1;
    }
}

}  // namespace

RankTable make_rank_table(Matrix ranks) {
    RankTable table;
    table.prefix = Matrix::Zero(ranks.rows() + 1, ranks.cols());
    for (Index i = 0; i < ranks.rows(); ++i) {
        table.prefix.row(i + 1) = table.prefix.row(i) + ranks.row(i);
    }
    table.ranks = std::move(ranks);
    return table;
}

RankTable compute_ranks(const ObservationMatrix& x) {
    Matrix ranks(x.rows(), x.dims());
    for (Index j = 0; j < x.dims(); ++j) {
        midranks(x.values().col(j), ranks.col(j));
    }
    return make_rank_table(std::move(ranks));
}

Vector RankCovariance::whiten(const Vector& v) const {
    return factor_.triangularView<Eigen::Lower>().solve(v);
}

double RankCovariance::quadratic_form(const Vector& v) const {
    return whiten(v).squaredNorm();
}

RankCovariance rank_covariance(const RankTable& table, double max_relative_ridge) {
    const Index n = table.rows();
    const Index dims = table.dims();
    const double inv_n = 1.0 / static_cast<double>(n);

    Matrix centered = (table.ranks * inv_n).array() - 0.5;
    Matrix sigma(dims, dims);
    for (Index a = 0; a < dims; ++a) {
        for (Index b = 0; b <= a; ++b) {
            const double s = centered.col(a).dot(centered.col(b)) * inv_n;
            sigma(a, b) = s;
            sigma(b, a) = s;
        }
    }

    const double scale = sigma.trace() / static_cast<double>(dims);
    const double max_diag = sigma.diagonal().maxCoeff();
    constexpr std::array<double, 6> kSchedule{0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};

    for (double step : kSchedule) {
        if (step > max_relative_ridge) break;
        const double ridge = step * scale;
        Matrix shifted = sigma;
        shifted.diagonal().array() += ridge;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() != Eigen::Success) continue;
        Matrix lower = llt.matrixL();
        const double min_pivot = lower.diagonal().array().square().minCoeff();
        // Rounding can leave a tiny positive pivot on an exactly singular matrix.
        if (!(min_pivot >= 1e-12 * max_diag)) continue;

        RankCovariance out;
        out.sigma_ = std::move(sigma);
        out.factor_ = std::move(lower);
        out.ridge_ = ridge;
        return out;
    }
    throw std::runtime_error("degenerate rank covariance: factorization failed up to ridge " +
                             std::to_string(max_relative_ridge) + " x trace/L");
}

}  // namespace dynmkw
