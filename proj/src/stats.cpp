#include "gibbsnet/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

namespace gibbsnet::stats {

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

TestResult chi_square_gof(std::span<const long> observed, std::span<const double> probabilities,
                          double min_expected) {
  TestResult r;
  for (long o : observed) r.n += o;
  const auto n = static_cast<double>(r.n);
  double pooled_o = 0.0, pooled_e = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probabilities[i] * n;
    if (e < min_expected) {
      pooled_o += static_cast<double>(observed[i]);
      pooled_e += e;
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    ++bins;
  }
  if (pooled_e > 0.0) {
    const double d = pooled_o - pooled_e;
    r.statistic += d * d / pooled_e;
    ++bins;
  } else if (pooled_o > 0.0) {
    // mass where none is expected
    r.statistic = std::numeric_limits<double>::infinity();
  }
  r.dof = bins - 1;
  r.p_value = std::isfinite(r.statistic) ? chi_square_sf(r.statistic, r.dof) : 0.0;
  return r;
}

TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b, double min_expected) {
  TestResult r;
  long na = 0, nb = 0;
  for (long x : a) na += x;
  for (long x : b) nb += x;
  r.n = na + nb;
  if (na == 0 || nb == 0) return r;
  const double fa = static_cast<double>(na) / static_cast<double>(r.n);
  const double fb = 1.0 - fa;
  double pa = 0.0, pb = 0.0;
  int cols = 0;
  auto add = [&](double oa, double ob) {
    const double tot = oa + ob;
    const double ea = tot * fa, eb = tot * fb;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    ++cols;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto oa = static_cast<double>(a[i]);
    const auto ob = static_cast<double>(b[i]);
    if ((oa + ob) * std::min(fa, fb) < min_expected) {
      pa += oa;
      pb += ob;
      continue;
    }
    add(oa, ob);
  }
  if (pa + pb > 0.0) add(pa, pb);
  r.dof = cols - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double>& samples, const std::function<double(double)>& cdf) {
  TestResult r;
  r.n = static_cast<long>(samples.size());
  if (samples.empty()) return r;
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

double binomial_cdf(long k, long n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  boost::math::binomial dist(static_cast<double>(n), p);
  return boost::math::cdf(dist, static_cast<double>(k));
}

LinearFit linear_fit(std::span<const double> y, double x0) {
  LinearFit f;
  const std::size_t n = y.size();
  if (n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + static_cast<double>(i);
    sx += x;
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x0 + static_cast<double>(i) - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  return f;
}

}  // namespace gibbsnet::stats
