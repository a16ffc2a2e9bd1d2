#include <cmath>
#include <map>

#include "doctest.h"
#include "gibbsnet/config.hpp"
#include "gibbsnet/mac.hpp"
#include "gibbsnet/stats.hpp"
#include "gibbsnet/validate.hpp"

using namespace gibbsnet;

namespace {

Network ring9() {
  RingParams rp;
  return make_network(ring_topology(rp), default_alpha(), ModulationTable::ieee80211g());
}

}  // namespace

TEST_CASE("worked example contention") {
  const auto fx = example_fixture();
  const auto& nbr = fx.net.nbr;
  // transmitters a=0, c=2, e=4, g=6 with backoffs 2, 0, 3, 1
  const std::vector<int> tx{0, 2, 4, 6};
  const std::vector<int> backoffs{2, 0, 3, 1};
  const auto round = resolve_contention(tx, backoffs, 5, [&](int a, int x) { return nbr.is_within_two_hops(a, x); });
  CHECK(round.decision_set == std::vector<int>{2, 6});
  CHECK(is_valid_decision_set(nbr, round.decision_set));
}

TEST_CASE("same-slot INTENTs from neighbors collide") {
  const std::vector<int> tx{0, 1, 2};
  auto chain = [](int a, int b) { return std::abs(a - b) == 1; };
  // 0 and 1 collide in slot 0 and 1's INTENT also silences 2
  const auto r = resolve_contention(tx, std::vector<int>{0, 0, 3}, 4, chain);
  CHECK(r.decision_set.empty());
  CHECK(r.broadcast == std::vector<std::uint8_t>{1, 1, 0});
  // collision between 0 and 2 does not matter when they do not conflict
  const auto s = resolve_contention(tx, std::vector<int>{0, 1, 0}, 4, chain);
  CHECK(s.decision_set == std::vector<int>{0, 2});
}

TEST_CASE("single transmitter always wins") {
  Rng rng(1);
  const std::vector<int> tx{5};
  for (int w : {1, 2, 32}) {
    for (int i = 0; i < 100; ++i) {
      const auto r = contend(tx, w, [](int, int) { return true; }, rng);
      CHECK(r.decision_set == std::vector<int>{5});
    }
  }
}

TEST_CASE("decision sets on the ring are valid and reach every transmitter") {
  const auto net = ring9();
  Rng rng(2);
  std::map<int, long> hits;
  const long rounds = 100000;
  for (long r = 0; r < rounds; ++r) {
    const auto round = generate_decision_set(net, 32, rng);
    REQUIRE(is_valid_decision_set(net.nbr, round.decision_set));
    for (int a : round.decision_set) ++hits[a];
  }
  const int d = contention_degree(net);
  const double bound = kDecisionSetC1 / (d + 1);
  for (int a : net.topo.transmitters()) {
    const long k = hits[a];
    // one-sided binomial test at alpha = 0.001
    CHECK(stats::binomial_cdf(k, rounds, bound) > 0.001);
  }
  CHECK_THROWS_AS(generate_decision_set(net, 0, rng), Error);
}

TEST_CASE("link selection") {
  // node 0 with three outgoing links, node 4 with one
  std::vector<Node> nodes;
  for (int i = 0; i < 6; ++i) nodes.push_back({i, {static_cast<double>(10 * i), 0}, ""});
  std::vector<Vec2> pos;
  for (const auto& n : nodes) pos.push_back(n.pos);
  Topology topo(nodes, {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}, {3, 4, 5}}, build_gain_matrix(pos, 3.5, Geometry::Plane),
                std::vector<double>(6, 1.0), std::vector<double>(6, 1e-9));
  Rng rng(3);
  const std::vector<int> dset{0, 4};

  // nothing active: uniform over the outgoing links
  std::map<int, long> counts;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i)
    for (int l : select_links(topo, dset, std::vector<double>(4, 0.0), rng)) ++counts[l];
  CHECK(counts[3] == trials);
  for (int l : {0, 1, 2}) CHECK(std::abs(counts[l] - trials / 3.0) < 3 * std::sqrt(trials * (1.0 / 3) * (2.0 / 3)));

  // link 1 active: chosen with probability 1/3, otherwise nothing
  counts.clear();
  for (long i = 0; i < trials; ++i)
    for (int l : select_links(topo, dset, std::vector<double>{0, 0.5, 0, 0}, rng)) ++counts[l];
  CHECK(counts[0] == 0);
  CHECK(counts[2] == 0);
  CHECK(std::abs(counts[1] - trials / 3.0) < 3 * std::sqrt(trials * (1.0 / 3) * (2.0 / 3)));

  // example network: one link per transmitter
  const auto fx = example_fixture();
  const auto chosen = select_links(fx.net.topo, std::vector<int>{2, 6}, fx.powers, rng);
  CHECK(chosen == std::vector<int>{1, 3});
}

TEST_CASE("decision sets do not depend on powers") {
  const auto net = ring9();
  std::vector<double> a(9, 0.0), b(9, 0.0);
  for (std::size_t l = 0; l < 9; l += 2) b[l] = 50.0;
  const auto r = decision_set_independence_check(net, 32, a, b, 50000, 77);
  CHECK(r.all_valid);
  CHECK(r.p_value > 0.01);
}
