#include "gibbsnet/mac.hpp"

#include <algorithm>
#include <map>

#include "gibbsnet/stats.hpp"

namespace gibbsnet {

DecisionRound generate_decision_set(const Network& net, int control_slots, Rng& rng) {
  if (control_slots < 1) throw Error("W must be at least 1");
  const auto& nbr = net.nbr;
  return contend(net.topo.transmitters(), control_slots,
                 [&nbr](int a, int x) { return nbr.is_within_two_hops(a, x); }, rng);
}

bool is_valid_decision_set(const NeighborhoodMap& nbr, std::span<const int> decision_set) {
  for (std::size_t i = 0; i < decision_set.size(); ++i)
    for (std::size_t j = i + 1; j < decision_set.size(); ++j)
      if (decision_set[i] == decision_set[j] || nbr.is_within_two_hops(decision_set[i], decision_set[j]))
        return false;
  return true;
}

std::vector<int> select_links(const Topology& topo, std::span<const int> decision_set,
                              std::span<const double> virtual_powers, Rng& rng) {
  std::vector<int> out;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int a : decision_set) {
    const auto& links = topo.outgoing(a);
    if (links.empty()) continue;
    const auto d = static_cast<int>(links.size());
    int active = -1;
    for (int l : links)
      if (virtual_powers[static_cast<std::size_t>(l)] > 0.0) {
        active = l;
        break;
      }
    if (active >= 0) {
      // losing the 1/d_a draw means no update this slot
      if (unif(rng) * d < 1.0) out.push_back(active);
    } else {
      std::uniform_int_distribution<int> pick(0, d - 1);
      out.push_back(links[static_cast<std::size_t>(pick(rng))]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int contention_degree(const Network& net) {
  int best = 0;
  for (int a : net.topo.transmitters()) {
    int count = 0;
    for (const Link& xy : net.topo.links())
      if (xy.tx != a && net.nbr.is_within_two_hops(a, xy.tx)) ++count;
    best = std::max(best, count);
  }
  return best;
}

IndependenceResult decision_set_independence_check(const Network& net, int control_slots,
                                                   std::span<const double> powers_a,
                                                   std::span<const double> powers_b, long rounds,
                                                   std::uint64_t seed) {
  IndependenceResult res;
  res.rounds = rounds;
  std::map<std::vector<int>, std::pair<long, long>> counts;
  auto run = [&](std::span<const double> powers, std::uint64_t s, bool first) {
    Rng rng(s);
    for (long r = 0; r < rounds; ++r) {
      auto round = generate_decision_set(net, control_slots, rng);
      if (!is_valid_decision_set(net.nbr, round.decision_set)) res.all_valid = false;
      // link selection consumes the powers; the decision set must not care
      (void)select_links(net.topo, round.decision_set, powers, rng);
      auto& c = counts[round.decision_set];
      (first ? c.first : c.second) += 1;
    }
  };
  run(powers_a, seed, true);
  run(powers_b, seed ^ 0x9e3779b97f4a7c15ULL, false);
  std::vector<long> a, b;
  for (const auto& [key, c] : counts) {
    a.push_back(c.first);
    b.push_back(c.second);
  }
  const auto t = stats::chi_square_homogeneity(a, b);
  res.p_value = t.p_value;
  res.statistic = t.statistic;
  res.dof = static_cast<int>(t.dof);
  return res;
}

}  // namespace gibbsnet
