#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace opre {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Standard Wilson score interval.
Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double level = 0.95);

// Inverse standard normal CDF (Acklam's rational approximation, |rel err| < 1.2e-9).
double normal_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

// Kolmogorov distribution survival Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_sf(double x);

// One-sample KS statistic of `sorted_sample` against a CDF, and its p-value
// via the asymptotic Kolmogorov law (sqrt(n) D). Conservative for discrete laws.
double ks_statistic(const std::vector<double>& sorted_sample, const std::function<double(double)>& cdf);
double ks_pvalue(double d, std::size_t n);

// Pearson chi-square against expected counts; bins with expected < min_expected
// are merged into their right neighbour. Returns the p-value.
double chi2_gof_pvalue(const std::vector<double>& observed, const std::vector<double>& expected,
                       double min_expected = 5.0, int extra_constraints = 0);

}  // namespace opre
