#pragma once

// Coordinate-wise rank transform and the empirical rank covariance.
//
// Ranks are midranks: tied values share the average of the positions they
// occupy, so every column still sums to n(n+1)/2. Without ties this is the
// usual count of observations <= x.

#include "dynmkw/observations.hpp"

namespace dynmkw {

struct RankTable {
    Matrix ranks;   // n x L, values in [1, n]
    Matrix prefix;  // (n+1) x L, prefix.row(0) == 0

    Index rows() const { return ranks.rows(); }
    Index dims() const { return ranks.cols(); }

    // Per-coordinate rank sum over rows [begin, end).
    Vector rank_sum(Index begin, Index end) const {
        return (prefix.row(end) - prefix.row(begin)).transpose();
    }
};

RankTable compute_ranks(const ObservationMatrix& x);

// Wraps an n x L rank matrix (for instance a row permutation of another
// table) and fills in the prefix sums.
RankTable make_rank_table(Matrix ranks);

// Sigma-hat: L x L covariance of the centered empirical c.d.f. values
//   sigma(l, l') = (1/n) sum_i (R_il/n - 1/2)(R_il'/n - 1/2),
// stored with a lower Cholesky factor of (sigma + ridge * I).
class RankCovariance {
public:
    const Matrix& sigma() const { return sigma_; }
    // Lower-triangular factor F with F F' = sigma + ridge * I.
    const Matrix& factor() const { return factor_; }
    double ridge() const { return ridge_; }
    bool regularized() const { return ridge_ > 0.0; }
    Index dims() const { return sigma_.rows(); }

    // F^{-1} v by forward substitution.
    Vector whiten(const Vector& v) const;
    // v' (sigma + ridge I)^{-1} v.
    double quadratic_form(const Vector& v) const;

private:
    friend RankCovariance rank_covariance(const RankTable&, double);
    Matrix sigma_;
    Matrix factor_;
    double ridge_ = 0.0;
};

// Largest ridge tried, relative to trace(sigma)/L.
inline constexpr double kDefaultMaxRidge = 1e-2;

// Factorizes sigma, escalating ridge through {0, 1e-10, 1e-8, ..., 1e-2} x
// trace/L (capped at max_relative_ridge) until the factor is well defined.
// Throws std::runtime_error("degenerate rank covariance ...") if none works.
RankCovariance rank_covariance(const RankTable& ranks,
                               double max_relative_ridge = kDefaultMaxRidge);

}  // namespace dynmkw
