#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gibbsnet/gibbs.hpp"
#include "gibbsnet/phy.hpp"

namespace gibbsnet {

/// One contention round: backoffs drawn by every contender and the winners.
struct DecisionRound {
  int control_slots = 0;
  std::vector<int> contenders;
  std::vector<int> backoffs;          // parallel to contenders
  std::vector<std::uint8_t> broadcast;  // parallel: sent an INTENT
  std::vector<int> decision_set;      // sorted node ids
};

/// Resolves a contention round for given backoffs. `conflicts(a, x)` must be
/// symmetric.
template <typename ConflictFn>
DecisionRound resolve_contention(std::span<const int> contenders, std::span<const int> backoffs, int control_slots,
                                 ConflictFn&& conflicts) {
  DecisionRound round;
  round.control_slots = control_slots;
  round.contenders.assign(contenders.begin(), contenders.end());
  round.backoffs.assign(backoffs.begin(), backoffs.end());
  const std::size_t n = contenders.size();
  round.broadcast.assign(n, 0);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return round.backoffs[i] < round.backoffs[j]; });

  // a contender broadcasts unless a conflicting contender broadcast in an
  // earlier control slot (heard or sensed as a collision)
  std::vector<std::uint8_t> silenced(n, 0);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    const int slot = round.backoffs[order[pos]];
    while (end < n && round.backoffs[order[end]] == slot) ++end;
    for (std::size_t k = pos; k < end; ++k)
      if (!silenced[order[k]]) round.broadcast[order[k]] = 1;
    for (std::size_t k = pos; k < end; ++k) {
      const std::size_t i = order[k];
      if (!round.broadcast[i]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && round.backoffs[j] > slot && conflicts(contenders[i], contenders[j])) silenced[j] = 1;
    }
    pos = end;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!round.broadcast[i]) continue;
    bool collided = false;
    for (std::size_t j = 0; j < n && !collided; ++j)
      collided = j != i && round.broadcast[j] && round.backoffs[j] == round.backoffs[i] &&
                 conflicts(contenders[i], contenders[j]);
    if (!collided) round.decision_set.push_back(contenders[i]);
  }
  std::sort(round.decision_set.begin(), round.decision_set.end());
  return round;
}

/// Backoff/INTENT contention among `contenders` with uniform backoffs in
/// [0, control_slots). Does not look at powers.
template <typename ConflictFn>
DecisionRound contend(std::span<const int> contenders, int control_slots, ConflictFn&& conflicts, Rng& rng) {
  std::vector<int> backoffs(contenders.size());
  std::uniform_int_distribution<int> draw(0, control_slots - 1);
  for (auto& b : backoffs) b = draw(rng);
  return resolve_contention(contenders, backoffs, control_slots, std::forward<ConflictFn>(conflicts));
}

/// Decision set over all transmitters, conflicts = one- or two-hop neighbors.
DecisionRound generate_decision_set(const Network& net, int control_slots, Rng& rng);

/// No two members are one- or two-hop neighbors.
bool is_valid_decision_set(const NeighborhoodMap& nbr, std::span<const int> decision_set);

/// Per transmitter in the decision set: its active outgoing link with
/// probability 1/d_a (nothing otherwise), or a uniform outgoing link when none
/// is active. Returns sorted link ids.
std::vector<int> select_links(const Topology& topo, std::span<const int> decision_set,
                              std::span<const double> virtual_powers, Rng& rng);

/// Number of links whose transmitter is a one- or two-hop neighbor, maximized
/// over transmitters.
int contention_degree(const Network& net);

/// Chi-square homogeneity test of decision-set distributions gathered under
/// two power configurations.
struct IndependenceResult {
  double p_value = 1.0;
  double statistic = 0.0;
  int dof = 0;
  long rounds = 0;
  bool all_valid = true;
};

IndependenceResult decision_set_independence_check(const Network& net, int control_slots,
                                                   std::span<const double> powers_a,
                                                   std::span<const double> powers_b, long rounds,
                                                   std::uint64_t seed);

}  // namespace gibbsnet
