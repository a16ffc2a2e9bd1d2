#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gibbsnet/topology.hpp"

namespace gibbsnet {

/// Per-link transmit powers, indexed by link id.
using PowerVector = std::vector<double>;

/// Topology, neighborhoods and modulation table bundled for the algorithms.
/// Immutable once built; safe to share across threads.
struct Network {
  Topology topo;
  NeighborhoodMap nbr;
  ModulationTable table;

  std::size_t num_links() const { return topo.num_links(); }
};

Network make_network(Topology topo, double alpha, ModulationTable table);

/// True when every entry is >= 0 and each node's outgoing sum is <= its pmax.
bool is_feasible(const Topology& topo, std::span<const double> powers, double rel_tol = 1e-12);

/// Global SINR of a link under the given powers.
double sinr(const Topology& topo, int link, std::span<const double> powers);

struct RateChoice {
  std::optional<std::size_t> scheme;
  double rate = 0.0;
};

RateChoice rate_for_sinr(double gamma, const ModulationTable& table);

/// Noise plus interference from links whose transmitter is a one-hop neighbor
/// of the receiver, plus the non-neighbor bound.
double noise_plus_partial_interference(const Network& net, int link, std::span<const double> powers);

/// Rate of a link from its localized SINR p g / Upsilon.
RateChoice virtual_rate(const Network& net, int link, std::span<const double> powers);

/// Rate from the global SINR.
RateChoice actual_rate(const Network& net, int link, std::span<const double> powers);

/// sum_l q_l * virtual_rate_l(p)
double virtual_weight(const Network& net, std::span<const double> powers, std::span<const double> queues);

}  // namespace gibbsnet
