#pragma once

#include <functional>
#include <span>

namespace dynmkw {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
// Upper tail, computed directly so small p-values keep their relative accuracy.
double chi2_sf(double x, double df);
// Inverse of chi2_cdf for p in (0, 1).
double chi2_quantile(double p, double df);

// Kolmogorov-Smirnov distance between a sample and a continuous c.d.f.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
// Asymptotic p-value of the one-sample KS test (Stephens' small-sample correction).
double ks_pvalue(double distance, std::size_t sample_size);

}  // namespace dynmkw
