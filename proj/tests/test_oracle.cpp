#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbsnet/oracle.hpp"
#include "gibbsnet/validate.hpp"

using namespace gibbsnet;

namespace {

PowerVector random_feasible(const Network& net, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PowerVector p(net.num_links());
  for (std::size_t l = 0; l < p.size(); ++l)
    p[l] = u(rng) < 0.3 ? 0.0 : u(rng) * net.topo.link_pmax(static_cast<int>(l));
  return p;
}

Network three_links(std::uint64_t seed) {
  RandomParams rp;
  rp.n_links = 3;
  rp.area_side_m = 120;
  rp.seed = seed;
  return make_network(random_topology(rp), default_alpha(), ModulationTable::ieee80211g());
}

}  // namespace

TEST_CASE("single link closed form") {
  std::vector<Node> nodes{{0, {0, 0}, ""}, {1, {1, 0}, ""}};
  GainMatrix gm(2, 0.0);
  gm(0, 1) = gm(1, 0) = 0.5;
  const ModulationTable one({{"only", 3.0, 6.0}});
  const auto net = make_network(Topology(nodes, {{0, 0, 1}}, gm, {40, 40}, {2, 2}), 1e-6, one);
  const double eps = 0.01, q = 5.0;
  const auto r = brute_force_optimum(net, std::vector<double>{q}, eps);
  CHECK(r.powers[0] == doctest::Approx(6.0 * 2.0 / 0.5).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(q * 3.0 - eps * 24.0).epsilon(1e-9));
  CHECK(r.schemes[0] == 0);
}

TEST_CASE("example network optimum") {
  const auto fx = example_fixture();
  const double eps = 0.01;
  const auto r = brute_force_optimum(fx.net, fx.queues, eps);
  CHECK(r.schemes == std::vector<int>{-1, 1, -1, -1});
  CHECK(r.powers[1] == doctest::Approx(8.0).epsilon(1e-8));
  CHECK(r.objective == doctest::Approx(200.0 - 8.0 * eps).epsilon(1e-8));
  CHECK(r.enumerated == 81);
  CHECK(objective(fx.net, r.powers, fx.queues, eps) == r.objective);

  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const auto p = random_feasible(fx.net, rng);
    CHECK(objective(fx.net, p, fx.queues, eps) <= r.objective);
  }
}

TEST_CASE("oracle dominates random feasible vectors on small instances") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto net = three_links(seed);
    const std::vector<double> q{7, 3, 11};
    const double eps = 0.01;
    const auto r = brute_force_optimum(net, q, eps);
    CHECK(is_feasible(net.topo, r.powers, 1e-9));
    CHECK(objective(net, r.powers, q, eps) == r.objective);
    Rng rng(seed);
    for (int i = 0; i < 100000; ++i) CHECK(objective(net, random_feasible(net, rng), q, eps) <= r.objective + 1e-12);
  }
  const auto line = line_network();
  const std::vector<double> q{6, 9, 4};
  const auto r = brute_force_optimum(line, q, 0.01);
  Rng rng(9);
  for (int i = 0; i < 100000; ++i) CHECK(objective(line, random_feasible(line, rng), q, 0.01) <= r.objective + 1e-12);
}

TEST_CASE("oracle refuses large or empty instances") {
  RingParams rp;
  rp.n_links = 7;
  const auto net = make_network(ring_topology(rp), default_alpha(), ModulationTable::ieee80211g());
  CHECK_THROWS_AS(brute_force_optimum(net, std::vector<double>(7, 1.0), 0.01), Error);
}

TEST_CASE("frozen super slots are reproducible") {
  const auto fx = example_fixture();
  GibbsConfig cfg;
  cfg.super_slot = 100;
  const auto a = frozen_super_slots(fx.net, fx.queues, cfg, 5, 3);
  const auto b = frozen_super_slots(fx.net, fx.queues, cfg, 5, 3);
  CHECK(a.objectives == b.objectives);
  CHECK(a.objectives.size() == 5);
  const auto best = brute_force_optimum(fx.net, fx.queues, cfg.epsilon);
  for (double o : a.objectives) CHECK(o <= best.objective + 1e-12);
}
