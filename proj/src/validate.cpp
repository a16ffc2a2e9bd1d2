#include "gibbsnet/validate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <random>

#include "gibbsnet/mac.hpp"
#include "gibbsnet/stats.hpp"
#include "json.hpp"

namespace gibbsnet {

bool SuiteReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

ExampleFixture example_fixture() {
  ExampleFixture f{make_network(example_network(), kExampleAlpha, ModulationTable::bpsk_qpsk()),
                   {15.0, 0.0, 10.0, 0.0},
                   {10.0, 100.0, 10.0, 0.0},
                   1};
  return f;
}

Network line_network() {
  // tx0 rx0 rx1 tx1 tx2 rx2 along the x axis
  const std::vector<double> xs{0.0, 20.0, 90.0, 110.0, 200.0, 220.0};
  std::vector<Node> nodes;
  std::vector<Vec2> pos;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    nodes.push_back({static_cast<int>(i), {xs[i], 0.0}, ""});
    pos.push_back({xs[i], 0.0});
  }
  const std::vector<Link> links{{0, 0, 1}, {1, 3, 2}, {2, 4, 5}};
  auto table = ModulationTable::ieee80211g();
  const double exponent = 3.5;
  const double noise = calibrated_noise(100.0, 20.0, exponent, table.schemes().back().min_sinr);
  Topology topo(nodes, links, build_gain_matrix(pos, exponent, Geometry::Plane), std::vector<double>(6, 100.0),
                std::vector<double>(6, noise));
  topo.path_loss_exponent = exponent;
  return make_network(std::move(topo), default_alpha(), std::move(table));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// interval masses by quadrature of the unnormalized density
std::vector<double> quadrature_interval_probabilities(const LocalWeightProfile& prof, double eps, double k) {
  double scale = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prof.num_intervals(); ++i) scale = std::max(scale, (prof.weights[i] - eps * prof.lo(i)) / k);
  std::vector<double> mass(prof.num_intervals());
  double total = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double v = prof.weights[i];
    auto f = [&](double p) { return std::exp((v - eps * p) / k - scale); };
    mass[i] = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, prof.lo(i), prof.hi(i), 30, 1e-13);
    total += mass[i];
  }
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace

SuiteReport sampler_density_suite(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "sampler_density";
  const auto fx = example_fixture();
  const auto prof = build_profile(fx.net, fx.updating, fx.powers, fx.queues);
  const SamplerMode mode = opts.mutate_sampler ? SamplerMode::UniformWithinInterval : SamplerMode::Exact;
  const std::vector<std::pair<double, double>> settings{{5.0, 0.1}, {0.5, 0.01}};
  Rng rng(opts.seed);
  for (const auto& [k, eps] : settings) {
    const std::string tag = "K=" + std::to_string(k).substr(0, 3) + ",eps=" + std::to_string(eps).substr(0, 4);
    std::vector<std::vector<double>> by_interval(prof.num_intervals());
    for (long s = 0; s < opts.density_samples; ++s) {
      const double p = sample_power(prof, eps, k, rng, mode);
      by_interval[prof.interval_of(p)].push_back(p);
    }
    std::vector<long> counts;
    for (const auto& v : by_interval) counts.push_back(static_cast<long>(v.size()));
    const auto expected = quadrature_interval_probabilities(prof, eps, k);
    const auto chi = stats::chi_square_gof(counts, expected);
    rep.checks.push_back({"chi_square_intervals[" + tag + "]", chi.p_value > 0.01, chi.p_value, 0.01, chi.n});

    const double rate = eps / k;
    for (std::size_t i = 0; i < by_interval.size(); ++i) {
      auto& v = by_interval[i];
      if (static_cast<long>(v.size()) < opts.min_interval_samples) continue;
      const double lo = prof.lo(i), hi = prof.hi(i);
      // truncated exponential on [lo, hi]
      auto cdf = [&](double x) { return -std::expm1(-rate * (x - lo)) / -std::expm1(-rate * (hi - lo)); };
      const auto ks = stats::ks_test(v, cdf);
      rep.checks.push_back({"ks_interval_" + std::to_string(i) + "[" + tag + "]", ks.p_value > 0.01, ks.p_value, 0.01,
                            ks.n});
    }
    const auto norm = normalizer_identity_check(prof, eps, k);
    rep.checks.push_back({"normalizer[" + tag + "]", norm.relative_difference() <= 1e-9, norm.relative_difference(),
                          1e-9, 0});
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

SuiteReport detailed_balance_suite(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "detailed_balance";
  const Network net = line_network();
  const std::vector<double> queues{6.0, 9.0, 4.0};
  const std::vector<int> dset{0, 2};
  const double eps = 0.01, k = 2.0;
  Rng rng(opts.seed + 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&](int l) {
    return unif(rng) < 0.3 ? 0.0 : unif(rng) * net.topo.link_pmax(l);
  };
  double worst = 0.0;
  for (long s = 0; s < opts.balance_pairs; ++s) {
    PowerVector p(net.num_links()), q;
    for (std::size_t l = 0; l < p.size(); ++l) p[l] = draw(static_cast<int>(l));
    q = p;
    for (int l : dset) q[static_cast<std::size_t>(l)] = draw(l);
    double fwd = stationary_log_density(net, p, queues, eps, k);
    double bwd = stationary_log_density(net, q, queues, eps, k);
    for (int l : dset) {
      const auto l_idx = static_cast<std::size_t>(l);
      fwd += log_conditional_density(build_profile(net, l, p, queues), eps, k, q[l_idx]);
      bwd += log_conditional_density(build_profile(net, l, q, queues), eps, k, p[l_idx]);
    }
    worst = std::max(worst, std::abs(fwd - bwd));
  }
  rep.checks.push_back({"max_abs_log_imbalance", worst <= 1e-9, worst, 1e-9, opts.balance_pairs});
  rep.seconds = seconds_since(t0);
  return rep;
}

SuiteReport decision_set_suite(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "decision_set";
  const Topology ring = ring_topology(RingParams{});
  const Network net = make_network(ring, default_alpha(), ModulationTable::ieee80211g());
  const int w = 32;
  Rng rng(opts.seed + 2);
  std::vector<long> hits(net.topo.num_nodes(), 0);
  long invalid = 0;
  for (long r = 0; r < opts.decision_rounds; ++r) {
    const auto round = generate_decision_set(net, w, rng);
    if (!is_valid_decision_set(net.nbr, round.decision_set)) ++invalid;
    for (int a : round.decision_set) ++hits[static_cast<std::size_t>(a)];
  }
  rep.checks.push_back({"all_sets_valid", invalid == 0, static_cast<double>(invalid), 0.0, opts.decision_rounds});

  const int d = contention_degree(net);
  const double bound = kDecisionSetC1 / (d + 1);
  // one-sided: H0 Pr(a in D) >= bound, rejected when P(X <= hits) < 0.001
  double worst_p = 1.0;
  for (int a : net.topo.transmitters())
    worst_p = std::min(worst_p, stats::binomial_cdf(hits[static_cast<std::size_t>(a)], opts.decision_rounds, bound));
  rep.checks.push_back({"membership_lower_bound(d=" + std::to_string(d) + ")", worst_p >= 0.001, worst_p, 0.001,
                        opts.decision_rounds});

  PowerVector zeros(net.num_links(), 0.0), busy(net.num_links(), 0.0);
  for (std::size_t l = 0; l < busy.size(); l += 2) busy[l] = net.topo.link_pmax(static_cast<int>(l));
  const auto ind = decision_set_independence_check(net, w, zeros, busy, opts.independence_rounds, opts.seed + 3);
  rep.checks.push_back({"power_independence", ind.p_value > 0.01 && ind.all_valid, ind.p_value, 0.01,
                        2 * opts.independence_rounds});
  rep.seconds = seconds_since(t0);
  return rep;
}

SuiteReport normalizer_suite(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "normalizer";
  const auto fx = example_fixture();
  const auto prof = build_profile(fx.net, fx.updating, fx.powers, fx.queues);
  double worst = 0.0;
  long count = 0;
  for (const auto& [k, eps] : std::vector<std::pair<double, double>>{{5.0, 0.1}, {0.5, 0.01}, {50.0, 0.01}}) {
    worst = std::max(worst, normalizer_identity_check(prof, eps, k).relative_difference());
    ++count;
  }
  // profiles from random ring states
  const Network ring = make_network(ring_topology(RingParams{}), default_alpha(), ModulationTable::ieee80211g());
  Rng rng(opts.seed + 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    PowerVector p(ring.num_links());
    std::vector<double> q(ring.num_links());
    for (std::size_t l = 0; l < p.size(); ++l) {
      p[l] = unif(rng) < 0.5 ? 0.0 : 100.0 * unif(rng);
      q[l] = 20.0 * unif(rng);
    }
    const auto pr = build_profile(ring, s % 9, p, q);
    const double k = 0.5 + 10.0 * unif(rng);
    worst = std::max(worst, normalizer_identity_check(pr, 0.01, k).relative_difference());
    ++count;
  }
  rep.checks.push_back({"max_relative_difference", worst <= 1e-9, worst, 1e-9, count});
  rep.seconds = seconds_since(t0);
  return rep;
}

std::vector<SuiteReport> run_validation(const ValidateOptions& opts) {
  return {sampler_density_suite(opts), detailed_balance_suite(opts), decision_set_suite(opts),
          normalizer_suite(opts)};
}

std::string validation_json(const std::vector<SuiteReport>& reports, const ValidateOptions& opts) {
  nlohmann::json j;
  j["seed"] = opts.seed;
  j["mutate_sampler"] = opts.mutate_sampler;
  bool all = true;
  for (const auto& r : reports) {
    nlohmann::json s;
    s["suite"] = r.suite;
    s["passed"] = r.passed();
    s["seconds"] = r.seconds;
    for (const auto& c : r.checks)
      s["checks"].push_back(
          {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"samples", c.samples}});
    j["suites"].push_back(s);
    all = all && r.passed();
  }
  j["passed"] = all;
  return j.dump(2) + "\n";
}

}  // namespace gibbsnet
