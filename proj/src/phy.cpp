#include "gibbsnet/phy.hpp"

namespace gibbsnet {

Network make_network(Topology topo, double alpha, ModulationTable table) {
  NeighborhoodMap nbr = compute_neighborhoods(topo, alpha);
  return Network{std::move(topo), std::move(nbr), std::move(table)};
}

bool is_feasible(const Topology& topo, std::span<const double> powers, double rel_tol) {
  if (powers.size() != topo.num_links()) return false;
  for (double p : powers)
    if (!(p >= 0.0)) return false;
  for (int a : topo.transmitters()) {
    double sum = 0.0;
    for (int l : topo.outgoing(a)) sum += powers[static_cast<std::size_t>(l)];
    if (sum > topo.pmax(a) * (1.0 + rel_tol)) return false;
  }
  return true;
}

double sinr(const Topology& topo, int link, std::span<const double> powers) {
  const Link& ab = topo.link(link);
  double denom = topo.noise(ab.rx);
  for (const Link& xy : topo.links())
    if (xy.id != link) denom += powers[static_cast<std::size_t>(xy.id)] * topo.gain(xy.tx, ab.rx);
  return powers[static_cast<std::size_t>(link)] * topo.link_gain(link) / denom;
}

RateChoice rate_for_sinr(double gamma, const ModulationTable& table) {
  auto s = table.best_for(gamma);
  return {s, table.rate_of(s)};
}

double noise_plus_partial_interference(const Network& net, int link, std::span<const double> powers) {
  const auto l = static_cast<std::size_t>(link);
  const int b = net.topo.link(link).rx;
  double u = net.nbr.noise_hat[l];
  for (int k : net.nbr.interferers[l]) u += powers[static_cast<std::size_t>(k)] * net.topo.gain(net.topo.link(k).tx, b);
  return u;
}

RateChoice virtual_rate(const Network& net, int link, std::span<const double> powers) {
  const double p = powers[static_cast<std::size_t>(link)];
  if (p <= 0.0) return {};
  return rate_for_sinr(p * net.topo.link_gain(link) / noise_plus_partial_interference(net, link, powers), net.table);
}

RateChoice actual_rate(const Network& net, int link, std::span<const double> powers) {
  if (powers[static_cast<std::size_t>(link)] <= 0.0) return {};
  return rate_for_sinr(sinr(net.topo, link, powers), net.table);
}

double virtual_weight(const Network& net, std::span<const double> powers, std::span<const double> queues) {
  double v = 0.0;
  for (std::size_t l = 0; l < net.num_links(); ++l)
    if (queues[l] != 0.0) v += queues[l] * virtual_rate(net, static_cast<int>(l), powers).rate;
  return v;
}

}  // namespace gibbsnet
