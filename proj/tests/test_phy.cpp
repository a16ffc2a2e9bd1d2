#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbsnet/phy.hpp"
#include "gibbsnet/validate.hpp"

using namespace gibbsnet;

namespace {

Network example() { return make_network(example_network(), kExampleAlpha, ModulationTable::bpsk_qpsk()); }

Network single_link(double g, double noise, double pmax) {
  std::vector<Node> nodes{{0, {0, 0}, ""}, {1, {1, 0}, ""}};
  GainMatrix gm(2, 0.0);
  gm(0, 1) = gm(1, 0) = g;
  return make_network(Topology(nodes, {{0, 0, 1}}, gm, {pmax, pmax}, {noise, noise}), 1e-6,
                      ModulationTable::bpsk_qpsk());
}

}  // namespace

TEST_CASE("global SINR on the example network") {
  const auto net = example();
  const PowerVector p{15, 29, 10, 0};
  CHECK(sinr(net.topo, 1, p) == doctest::Approx(4.0).epsilon(1e-12));
  const PowerVector zero(4, 0.0);
  for (int l = 0; l < 4; ++l) CHECK(sinr(net.topo, l, zero) == 0.0);
  CHECK(sinr(single_link(1.0, 1.0, 40).topo, 0, PowerVector{10}) == doctest::Approx(10.0));
}

TEST_CASE("SINR is scale invariant in powers and noise together") {
  const auto net = example();
  const PowerVector p{15, 29, 10, 3};
  auto topo = net.topo;
  std::vector<double> noise = topo.noise_all();
  for (double& x : noise) x *= 7.0;
  Topology scaled(topo.nodes(), topo.links(), topo.gains(), std::vector<double>(8, 280.0), noise);
  PowerVector p7 = p;
  for (double& x : p7) x *= 7.0;
  for (int l = 0; l < 4; ++l) CHECK(sinr(scaled, l, p7) == doctest::Approx(sinr(topo, l, p)).epsilon(1e-12));
}

TEST_CASE("rate selection picks the highest feasible scheme") {
  const auto t = ModulationTable::bpsk_qpsk();
  CHECK(rate_for_sinr(4.0, t).rate == 1.0);
  CHECK(*rate_for_sinr(4.0, t).scheme == 0);
  CHECK(rate_for_sinr(3.99, t).rate == 0.0);
  CHECK(!rate_for_sinr(3.99, t).scheme);
  CHECK(rate_for_sinr(8.0, t).rate == 2.0);

  // nondecreasing step function with exactly |table| jumps
  const auto g = ModulationTable::ieee80211g();
  int jumps = 0;
  double prev = 0.0;
  for (double db = -5; db <= 40; db += 0.001) {
    const double r = rate_for_sinr(std::pow(10.0, db / 10), g).rate;
    CHECK(r >= prev);
    if (r > prev) ++jumps;
    prev = r;
  }
  CHECK(jumps == 8);
}

TEST_CASE("noise plus partial interference on the example") {
  const auto net = example();
  CHECK(noise_plus_partial_interference(net, 1, PowerVector{15, 0, 10, 0}) == doctest::Approx(7.25));
  CHECK(noise_plus_partial_interference(net, 0, PowerVector{0, 0, 10, 0}) == doctest::Approx(1.0));
  // own power never counts as interference
  CHECK(noise_plus_partial_interference(net, 1, PowerVector{15, 33, 10, 0}) == doctest::Approx(7.25));
  CHECK(noise_plus_partial_interference(net, 3, PowerVector(4, 0.0)) == doctest::Approx(net.nbr.noise_hat[3]));
}

TEST_CASE("virtual rate on the example") {
  const auto net = example();
  CHECK(virtual_rate(net, 1, PowerVector{15, 29, 10, 0}).rate == 1.0);
  CHECK(virtual_rate(net, 1, PowerVector{15, 0, 10, 0}).rate == 0.0);
  CHECK(virtual_rate(net, 1, PowerVector{15, 28.9, 10, 0}).rate == 0.0);
  CHECK(virtual_weight(net, PowerVector{15, 29, 10, 0}, std::vector<double>{10, 100, 10, 0}) ==
        doctest::Approx(100.0));
}

TEST_CASE("feasibility of power vectors") {
  const auto net = example();
  CHECK(is_feasible(net.topo, PowerVector{40, 0, 0, 0}));
  CHECK(!is_feasible(net.topo, PowerVector{40.1, 0, 0, 0}));
  CHECK(!is_feasible(net.topo, PowerVector{-1, 0, 0, 0}));
}

TEST_CASE("actual rate dominates virtual rate") {
  RandomParams rp;
  rp.n_links = 40;
  rp.area_side_m = 400;
  rp.seed = 9;
  const auto net = make_network(random_topology(rp), default_alpha(), ModulationTable::ieee80211g());
  const auto line = line_network();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Network* n : {&net, &line}) {
    for (int trial = 0; trial < 500; ++trial) {
      PowerVector p(n->num_links());
      for (std::size_t l = 0; l < p.size(); ++l)
        p[l] = u(rng) < 0.5 ? 0.0 : u(rng) * n->topo.link_pmax(static_cast<int>(l));
      for (std::size_t l = 0; l < p.size(); ++l) {
        const int li = static_cast<int>(l);
        CHECK(actual_rate(*n, li, p).rate >= virtual_rate(*n, li, p).rate);
      }
    }
  }
}
