#include "gibbsnet/gibbs.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gibbsnet {

namespace {

// log(e^{-r lo} - e^{-r hi}) for hi > lo, r > 0
double log_exp_diff(double rate, double lo, double hi) {
  return -rate * lo + std::log(-std::expm1(-rate * (hi - lo)));
}

double log_sum_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> local_upsilon(const Network& net, std::span<const double> powers) {
  std::vector<double> u(net.num_links());
  for (std::size_t l = 0; l < u.size(); ++l) u[l] = noise_plus_partial_interference(net, static_cast<int>(l), powers);
  return u;
}

}  // namespace

std::size_t LocalWeightProfile::interval_of(double p) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), p);
  auto idx = static_cast<std::ptrdiff_t>(std::distance(breakpoints.begin(), it)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(num_intervals()) - 1);
  return static_cast<std::size_t>(idx);
}

double TemperatureSchedule::operator()(int t) const {
  if (t < 0) throw Error("temperature index must be >= 0");
  return k0 / std::log(2.0 + std::min(t, cap));
}

double temperature(int t, const TemperatureSchedule& schedule) { return schedule(t); }

double critical_power(const Network& net, int updating, int affected, std::size_t scheme,
                      std::span<const double> powers, std::span<const double> upsilon) {
  const Link& ab = net.topo.link(updating);
  const Link& xy = net.topo.link(affected);
  const double pmax = net.topo.pmax(ab.tx);
  const auto x = static_cast<std::size_t>(affected);
  const double u_req = powers[x] * net.topo.link_gain(affected) / net.table[scheme].min_sinr;
  const double g_ay = net.topo.gain(ab.tx, xy.rx);
  const double p = powers[static_cast<std::size_t>(updating)] + (u_req - upsilon[x]) / g_ay;
  return std::min(pmax, std::max(0.0, p));
}

LocalWeightProfile build_profile(const Network& net, int link, std::span<const double> powers,
                                 std::span<const double> queues) {
  const auto u = local_upsilon(net, powers);
  return build_profile(net, link, powers, u, queues);
}

LocalWeightProfile build_profile(const Network& net, int link, std::span<const double> powers,
                                 std::span<const double> upsilon, std::span<const double> queues) {
  const auto l = static_cast<std::size_t>(link);
  const Link& ab = net.topo.link(link);
  const double pmax = net.topo.pmax(ab.tx);
  const double p_cur = powers[l];
  const double own_gain = net.topo.link_gain(link);

  LocalWeightProfile prof;
  prof.link = link;
  prof.affected = net.nbr.affected[l];

  std::vector<double> cps{0.0, pmax};
  for (std::size_t m = 0; m < net.table.size(); ++m) {
    const double own = net.table[m].min_sinr * upsilon[l] / own_gain;
    if (own < pmax) cps.push_back(own);
  }
  for (int k : prof.affected) {
    if (k == link || powers[static_cast<std::size_t>(k)] <= 0.0) continue;
    for (std::size_t m = 0; m < net.table.size(); ++m) cps.push_back(critical_power(net, link, k, m, powers, upsilon));
  }
  std::sort(cps.begin(), cps.end());
  const double tol = 1e-12 * pmax;
  for (double c : cps)
    if (prof.breakpoints.empty() || c - prof.breakpoints.back() > tol) prof.breakpoints.push_back(c);
  // keep pmax exact as the closing breakpoint
  if (pmax - prof.breakpoints.back() <= tol) prof.breakpoints.back() = pmax;
  else prof.breakpoints.push_back(pmax);

  const std::size_t m = prof.breakpoints.size() - 1;
  prof.weights.assign(m, 0.0);
  prof.rates.assign(m, std::vector<double>(prof.affected.size(), 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    // rates are constant on the open interval; the midpoint avoids the
    // threshold ties sitting exactly on each breakpoint
    const double mid = 0.5 * (prof.breakpoints[i] + prof.breakpoints[i + 1]);
    double w = 0.0;
    for (std::size_t j = 0; j < prof.affected.size(); ++j) {
      const int k = prof.affected[j];
      const auto uk = static_cast<std::size_t>(k);
      double gamma = 0.0;
      if (k == link) {
        gamma = mid * own_gain / upsilon[l];
      } else if (powers[uk] > 0.0) {
        const double g_ay = net.topo.gain(ab.tx, net.topo.link(k).rx);
        const double u_k = upsilon[uk] + (mid - p_cur) * g_ay;
        gamma = powers[uk] * net.topo.link_gain(k) / u_k;
      }
      const double r = gamma > 0.0 ? rate_for_sinr(gamma, net.table).rate : 0.0;
      prof.rates[i][j] = r;
      w += r * queues[uk];
    }
    prof.weights[i] = w;
  }
  return prof;
}

std::vector<double> interval_log_masses(const LocalWeightProfile& profile, double epsilon, double k) {
  if (!(epsilon > 0.0) || !(k > 0.0)) throw Error("epsilon and K must be positive");
  const double rate = epsilon / k;
  std::vector<double> out(profile.num_intervals());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = log_exp_diff(rate, profile.lo(i), profile.hi(i)) + profile.weights[i] / k;
  return out;
}

std::vector<double> interval_probabilities(const LocalWeightProfile& profile, double epsilon, double k) {
  auto lm = interval_log_masses(profile, epsilon, k);
  const double z = log_sum_exp(lm);
  for (double& x : lm) x = std::exp(x - z);
  return lm;
}

double truncated_exponential_quantile(double lo, double hi, double rate, double u) {
  // F(p) = (1 - e^{-rate (p - lo)}) / (1 - e^{-rate (hi - lo)})
  const double p = lo - std::log1p(u * std::expm1(-rate * (hi - lo))) / rate;
  return std::clamp(p, lo, hi);
}

double sample_power(const LocalWeightProfile& profile, double epsilon, double k, Rng& rng, SamplerMode mode) {
  const auto probs = interval_probabilities(profile, epsilon, k);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  std::size_t i = 0;
  for (; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) break;
    u -= probs[i];
  }
  const double lo = profile.lo(i);
  const double hi = profile.hi(i);
  const double v = unif(rng);
  if (mode == SamplerMode::UniformWithinInterval) return lo + v * (hi - lo);
  return truncated_exponential_quantile(lo, hi, epsilon / k, v);
}

double log_conditional_density(const LocalWeightProfile& profile, double epsilon, double k, double p) {
  const auto lm = interval_log_masses(profile, epsilon, k);
  const double log_z = log_sum_exp(lm);  // log Z_ab
  // f(p) = (eps/K) e^{-eps p/K} e^{V_i/K} / Z_ab
  return std::log(epsilon / k) - epsilon * p / k + profile.weight_at(p) / k - log_z;
}

double NormalizerCheck::relative_difference() const {
  return std::abs(numeric - closed_form) / std::max(std::abs(closed_form), std::numeric_limits<double>::min());
}

NormalizerCheck normalizer_identity_check(const LocalWeightProfile& profile, double epsilon, double k) {
  NormalizerCheck out;
  double scale = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.num_intervals(); ++i)
    scale = std::max(scale, (profile.weights[i] - epsilon * profile.lo(i)) / k);
  out.log_scale = scale;

  const auto lm = interval_log_masses(profile, epsilon, k);
  double z = 0.0;
  for (double x : lm) z += std::exp(x - scale);
  out.closed_form = z * k / epsilon;

  // quadrature of the density itself on each interval; the step value comes
  // from weight_at, not from the interval index
  auto f = [&](double p) { return std::exp((profile.weight_at(p) - epsilon * p) / k - scale); };
  out.numeric = 0.0;
  for (std::size_t i = 0; i < profile.num_intervals(); ++i) {
    const double lo = profile.lo(i), hi = profile.hi(i);
    const double inset = 1e-12 * (hi - lo);
    auto g = [&](double p) { return f(std::clamp(p, lo + inset, hi - inset)); };
    out.numeric += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, lo, hi, 10, 1e-13);
  }
  return out;
}

double stationary_log_density(const Network& net, std::span<const double> powers, std::span<const double> queues,
                              double epsilon, double k) {
  const double sum_p = std::accumulate(powers.begin(), powers.end(), 0.0);
  return (virtual_weight(net, powers, queues) - epsilon * sum_p) / k;
}

std::string profile_csv(const LocalWeightProfile& profile) {
  std::ostringstream out;
  out.precision(17);
  out << "lo,hi,weight\n";
  for (std::size_t i = 0; i < profile.num_intervals(); ++i)
    out << profile.lo(i) << ',' << profile.hi(i) << ',' << profile.weights[i] << '\n';
  return out.str();
}

}  // namespace gibbsnet
