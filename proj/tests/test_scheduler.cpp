#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "gibbsnet/scheduler.hpp"
#include "gibbsnet/validate.hpp"

using namespace gibbsnet;

namespace {

Network ring9() {
  RingParams rp;
  return make_network(ring_topology(rp), default_alpha(), ModulationTable::ieee80211g());
}

Network random_net(int n, double side, std::uint64_t seed) {
  RandomParams rp;
  rp.n_links = n;
  rp.area_side_m = side;
  rp.seed = seed;
  return make_network(random_topology(rp), default_alpha(), ModulationTable::ieee80211g());
}

// every maximal independent set by subset enumeration
std::set<std::vector<int>> all_maximal_sets(const ConflictGraph& cg) {
  const int n = static_cast<int>(cg.size());
  std::set<std::vector<int>> out;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    bool indep = true;
    for (std::size_t i = 0; i < s.size() && indep; ++i)
      for (std::size_t j = i + 1; j < s.size() && indep; ++j) indep = !cg.conflicts(s[i], s[j]);
    if (!indep) continue;
    bool maximal = true;
    for (int k = 0; k < n && maximal; ++k) {
      if (mask & (1 << k)) continue;
      bool blocked = false;
      for (int x : s) blocked = blocked || cg.conflicts(k, x);
      maximal = blocked;
    }
    if (maximal) out.insert(s);
  }
  return out;
}

}  // namespace

TEST_CASE("ring conflict graph") {
  const auto net = ring9();
  const auto cg = build_conflict_graph(net.topo, 40.0);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      if (i == j) continue;
      const int d = std::min((i - j + 9) % 9, (j - i + 9) % 9);
      CHECK(cg.conflicts(i, j) == (d <= 3));
      CHECK(cg.conflicts(i, j) == cg.conflicts(j, i));
    }
  }
}

TEST_CASE("CSMA yields maximal independent sets") {
  const auto net = ring9();
  const auto cg = build_conflict_graph(net.topo, 40.0);
  const auto maximal = all_maximal_sets(cg);
  std::size_t largest = 0;
  for (const auto& s : maximal) largest = std::max(largest, s.size());
  CHECK(largest == 2);
  Rng rng(5);
  const std::vector<double> q(9, 3.0);
  std::set<std::vector<int>> seen;
  for (int i = 0; i < 5000; ++i) {
    const auto s = csma_schedule(q, cg, rng);
    CHECK(maximal.count(s) == 1);
    seen.insert(s);
  }
  CHECK(seen.size() == maximal.size());

  // backlog gating
  std::vector<double> sparse(9, 0.0);
  sparse[4] = 1.0;
  CHECK(csma_schedule(sparse, cg, rng) == std::vector<int>{4});
  CHECK(csma_schedule(std::vector<double>(9, 0.0), cg, rng).empty());
}

TEST_CASE("CSMA on a clique picks one link uniformly") {
  const auto net = random_net(4, 60, 2);
  const auto cg = build_conflict_graph(net.topo, 1e6);
  Rng rng(6);
  std::map<int, long> counts;
  const long trials = 40000;
  for (long i = 0; i < trials; ++i) {
    const auto s = csma_schedule(std::vector<double>(4, 1.0), cg, rng);
    REQUIRE(s.size() == 1);
    ++counts[s[0]];
  }
  for (int l = 0; l < 4; ++l) CHECK(std::abs(counts[l] - trials / 4.0) < 4 * std::sqrt(trials * 0.25 * 0.75));

  const auto one = random_net(1, 100, 3);
  const auto cg1 = build_conflict_graph(one.topo, 40.0);
  CHECK(csma_schedule(std::vector<double>{2.0}, cg1, rng) == std::vector<int>{0});
}

TEST_CASE("Q-CSMA activation probability and schedules") {
  CHECK(qcsma_activation_probability(0.0) == doctest::Approx(0.1 / 1.1));
  CHECK(qcsma_activation_probability(9.9) == doctest::Approx(10.0 / 11.0));

  const auto net = random_net(25, 250, 4);
  const auto cg = build_conflict_graph(net.topo, 100.0);
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> prev;
  for (int t = 0; t < 5000; ++t) {
    std::vector<double> q(25);
    for (double& x : q) x = u(rng) < 0.2 ? 0.0 : std::floor(u(rng) * 20);
    prev = qcsma_schedule(q, cg, prev, 32, rng);
    CHECK(is_independent_set(cg, prev));
    for (int l : prev) CHECK(q[static_cast<std::size_t>(l)] > 0.0);
  }
  CHECK(qcsma_schedule(std::vector<double>(25, 0.0), cg, prev, 32, rng).empty());
}

TEST_CASE("full-power rates") {
  const auto net = ring9();
  const auto r = rates_at_full_power(net, std::vector<int>{3});
  CHECK(r[3] == doctest::Approx(4.5));
  for (int l = 0; l < 9; ++l)
    if (l != 3) CHECK(r[static_cast<std::size_t>(l)] == 0.0);
}

TEST_CASE("initial temperature modes") {
  const auto net = ring9();
  const std::vector<double> q{10, 0, 0, 0, 0, 0, 0, 0, 0};
  GibbsConfig cfg;
  CHECK(initial_temperature(net, q, cfg) == doctest::Approx(0.01 * 1e-6 * 100));
  cfg.k0_mode = K0Mode::Scaled;
  CHECK(initial_temperature(net, q, cfg) == doctest::Approx(0.1 * 10 * 4.5));
  CHECK(initial_temperature(net, std::vector<double>(9, 0.0), cfg) > 0.0);
  cfg.k0_mode = K0Mode::Theorem;
  CHECK(initial_temperature(net, q, cfg) == doctest::Approx(2 * 9 * (10 * 4.5 + 0.01 * 900)));
  cfg.k0 = 2.5;
  CHECK(initial_temperature(net, q, cfg) == 2.5);
  cfg.k0 = -1.0;
  CHECK_THROWS_AS(initial_temperature(net, q, cfg), Error);
}

TEST_CASE("Gibbs slots keep Upsilon consistent and touch only selected links") {
  const auto net = random_net(40, 400, 8);
  auto state = initial_gibbs_state(net);
  std::vector<double> q(40);
  for (std::size_t l = 0; l < q.size(); ++l) q[l] = static_cast<double>((l * 7) % 13);
  GibbsConfig cfg;
  cfg.k0 = 5.0;
  begin_super_slot(state, net, q, cfg);
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const auto before = state.vpowers;
    const auto tr = gibbs_slot(state, net, cfg.epsilon, cfg.control_slots, rng);
    CHECK(state.t == t + 1);
    CHECK(upsilon_consistent(state, net));
    CHECK(is_feasible(net.topo, state.vpowers));
    CHECK(is_valid_decision_set(net.nbr, tr.round.decision_set));
    std::set<int> chosen(tr.link_decision_set.begin(), tr.link_decision_set.end());
    for (std::size_t l = 0; l < before.size(); ++l)
      if (!chosen.count(static_cast<int>(l))) CHECK(state.vpowers[l] == before[l]);
    CHECK(state.queues == q);
  }
}

TEST_CASE("single link settles just above its top-rate threshold") {
  const auto net = random_net(1, 100, 10);
  const double top_power = net.table.schemes().back().min_sinr * net.nbr.noise_hat[0] / net.topo.link_gain(0);
  auto state = initial_gibbs_state(net);
  GibbsConfig cfg;
  cfg.k0 = 1e-4;
  begin_super_slot(state, net, std::vector<double>{100.0}, cfg);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) gibbs_slot(state, net, cfg.epsilon, cfg.control_slots, rng);
  CHECK(state.vpowers[0] >= top_power);
  CHECK(state.vpowers[0] <= top_power + 0.1);
  const auto c = commit_real_powers(state, net);
  CHECK(c.rates[0] == doctest::Approx(4.5));
}

TEST_CASE("example network chain finds the heavy link") {
  const auto fx = example_fixture();
  auto state = initial_gibbs_state(fx.net);
  GibbsConfig cfg;
  cfg.super_slot = 500;
  begin_super_slot(state, fx.net, fx.queues, cfg);
  Rng rng(12);
  for (int t = 0; t < 500; ++t) gibbs_slot(state, fx.net, cfg.epsilon, 5, rng);
  const auto c = commit_real_powers(state, fx.net);
  CHECK(c.virtual_rates[1] == 2.0);
  CHECK(c.virtual_rates[0] == 0.0);
  CHECK(c.virtual_rates[2] == 0.0);
  CHECK(c.violations == 0);
}

TEST_CASE("commit of all-zero powers") {
  const auto net = ring9();
  auto state = initial_gibbs_state(net);
  const auto c = commit_real_powers(state, net);
  for (double r : c.rates) CHECK(r == 0.0);
  for (int s : c.schemes) CHECK(s == -1);
  CHECK(c.dominated_pairs == 9);
  CHECK(c.violations == 0);
}

TEST_CASE("Gibbs policy transmits nothing in the first super slot") {
  const auto net = ring9();
  GibbsConfig cfg;
  cfg.super_slot = 10;
  GibbsPolicy pol(net, cfg, true);
  Rng rng(13);
  const std::vector<double> q(9, 50.0);
  long commits = 0;
  pol.on_commit = [&](long slot, const CommitResult& c) {
    ++commits;
    CHECK((slot + 1) % 10 == 0);
    CHECK(c.violations == 0);
  };
  for (long s = 0; s < 10; ++s)
    for (double r : pol.rates(s, q, rng)) CHECK(r == 0.0);
  CHECK(commits == 1);
  double served = 0.0;
  for (long s = 10; s < 100; ++s)
    for (double r : pol.rates(s, q, rng)) served += r;
  CHECK(served > 0.0);
  CHECK(pol.counters().super_slots == 10);
  CHECK(pol.counters().upsilon_inconsistencies == 0);

  GibbsConfig bad;
  bad.super_slot = 0;
  CHECK_THROWS_AS(GibbsPolicy(net, bad), Error);
  bad = GibbsConfig{};
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(GibbsPolicy(net, bad), Error);
}
