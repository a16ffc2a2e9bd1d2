#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gibbsnet::stats {

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
  long n = 0;
};

/// Goodness of fit of observed counts against expected probabilities. Bins
/// with expected count below `min_expected` are pooled.
TestResult chi_square_gof(std::span<const long> observed, std::span<const double> probabilities,
                          double min_expected = 5.0);

/// 2 x k homogeneity test; sparse columns are pooled.
TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b, double min_expected = 5.0);

/// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_sf(double lambda);

/// One-sample KS test; `samples` is sorted in place.
TestResult ks_test(std::vector<double>& samples, const std::function<double(double)>& cdf);

/// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(long k, long n, double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> y, double x0 = 0.0);

}  // namespace gibbsnet::stats
