#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gibbsnet/scheduler.hpp"

namespace gibbsnet {

inline constexpr std::size_t kOracleMaxLinks = 6;

struct OracleResult {
  PowerVector powers;
  std::vector<int> schemes;  // virtual scheme per link, -1 when off
  double objective = 0.0;    // sum q r~ - eps sum p
  long enumerated = 0;       // target vectors visited
  long feasible = 0;         // of which had a feasible minimal-power solution
};

/// sum_l q_l r~_l(p) - eps sum_l p_l
double objective(const Network& net, std::span<const double> powers, std::span<const double> queues, double epsilon);

/// Exact maximizer of the virtual MaxWeight objective. Enumerates a target
/// scheme (or off) per link and solves the minimal-power linear system for
/// the localized SINR constraints; every feasible power vector is dominated
/// by the minimal solution of its own scheme vector.
OracleResult brute_force_optimum(const Network& net, std::span<const double> queues, double epsilon);

/// Final objectives of `runs` independent super slots of length cfg.super_slot
/// with frozen queues, each started from all-zero virtual powers.
struct FrozenRunSummary {
  std::vector<double> objectives;
  std::vector<PowerVector> finals;
};

FrozenRunSummary frozen_super_slots(const Network& net, std::span<const double> queues, const GibbsConfig& cfg,
                                    int runs, std::uint64_t seed);

}  // namespace gibbsnet
