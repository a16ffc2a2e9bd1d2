#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbsnet/gibbs.hpp"
#include "gibbsnet/mac.hpp"
#include "gibbsnet/phy.hpp"

namespace gibbsnet {

enum class K0Mode {
  /// K0 = eps * power_fraction * max_a pmax_a: idle links settle near
  /// power_fraction * pmax at the start of the super slot
  Penalty,
  /// K0 = kappa * max_l(q_l) * r_max
  Scaled,
  /// K0 = 2 n Delta_hat, Delta_hat = sum_l q_l r_max + eps sum_a pmax_a
  Theorem,
};

struct GibbsConfig {
  int super_slot = 50;      // T
  int control_slots = 32;   // W
  double epsilon = 0.01;    // per linear power unit
  K0Mode k0_mode = K0Mode::Penalty;
  double power_fraction = 1e-6;
  double kappa = 0.1;
  std::optional<double> k0;        // overrides k0_mode when set
  std::optional<int> anneal_cap;   // N; defaults to T
  SamplerMode sampler = SamplerMode::Exact;
};

/// Initial temperature for a super slot given its frozen queues.
double initial_temperature(const Network& net, std::span<const double> queues, const GibbsConfig& cfg);

struct GibbsState {
  PowerVector vpowers;
  std::vector<double> upsilon;
  std::vector<double> queues;  // snapshot, fixed for the whole super slot
  int t = 0;                   // slots completed in the current super slot
  TemperatureSchedule schedule;

  PowerVector committed_powers;
  std::vector<int> committed_scheme;  // -1 when no scheme is feasible
  std::vector<double> committed_rates;
};

GibbsState initial_gibbs_state(const Network& net);

/// Freezes the queues and resets annealing time.
void begin_super_slot(GibbsState& state, const Network& net, std::span<const double> queues, const GibbsConfig& cfg);

struct SlotTrace {
  DecisionRound round;
  std::vector<int> link_decision_set;
  std::vector<double> new_powers;  // parallel to link_decision_set
  double temperature = 0.0;
};

/// One background slot: decision set, link selection, profile build and
/// sampling at K_t, then the Upsilon refresh for neighbors of changed links.
SlotTrace gibbs_slot(GibbsState& state, const Network& net, double epsilon, int control_slots, Rng& rng,
                     SamplerMode mode = SamplerMode::Exact);

/// Recomputes every Upsilon from scratch and compares.
bool upsilon_consistent(const GibbsState& state, const Network& net, double rel_tol = 1e-9);

struct CommitResult {
  PowerVector powers;
  std::vector<int> schemes;
  std::vector<double> rates;
  std::vector<double> virtual_rates;
  long dominated_pairs = 0;  // links with actual rate >= virtual rate
  long violations = 0;
};

/// Real powers <- virtual powers; rates from the global SINR.
CommitResult commit_real_powers(GibbsState& state, const Network& net);

struct ConflictGraph {
  std::vector<std::vector<int>> adj;
  std::vector<std::vector<std::uint8_t>> matrix;

  bool conflicts(int a, int b) const {
    return matrix[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0;
  }
  std::size_t size() const { return adj.size(); }
};

/// Links conflict when either receiver is within `sense_range_m` of the other
/// link's transmitter, or when they share a node.
ConflictGraph build_conflict_graph(const Topology& topo, double sense_range_m);

bool is_independent_set(const ConflictGraph& cg, std::span<const int> links);
bool is_maximal_independent_set(const ConflictGraph& cg, std::span<const int> links,
                                std::span<const std::uint8_t> eligible);

/// Greedy random maximal independent set among backlogged links.
std::vector<int> csma_schedule(std::span<const double> queues, const ConflictGraph& cg, Rng& rng);

/// exp(w)/(1+exp(w)) with w = log(0.1 + q).
double qcsma_activation_probability(double queue);

/// One Q-CSMA step from the previous schedule.
std::vector<int> qcsma_schedule(std::span<const double> queues, const ConflictGraph& cg,
                                std::span<const int> previous, int control_slots, Rng& rng);

/// Per-link rates when `active` links transmit at pmax.
std::vector<double> rates_at_full_power(const Network& net, std::span<const int> active);

struct PolicyCounters {
  long super_slots = 0;
  long dominated_pairs = 0;
  long domination_violations = 0;
  long upsilon_inconsistencies = 0;
};

/// Maps (slot, queues, rng) to the service rates used in that slot.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> rates(long slot, std::span<const double> queues, Rng& rng) = 0;
  virtual PolicyCounters counters() const { return {}; }
};

class GibbsPolicy : public SchedulingPolicy {
 public:
  GibbsPolicy(const Network& net, GibbsConfig cfg, bool check_consistency = false);
  std::string name() const override { return "gibbs"; }
  std::vector<double> rates(long slot, std::span<const double> queues, Rng& rng) override;
  PolicyCounters counters() const override { return counters_; }
  const GibbsState& state() const { return state_; }
  /// Called after every commit.
  std::function<void(long slot, const CommitResult&)> on_commit;

 private:
  const Network& net_;
  GibbsConfig cfg_;
  bool check_;
  GibbsState state_;
  std::vector<double> current_rates_;
  PolicyCounters counters_;
};

class CsmaPolicy : public SchedulingPolicy {
 public:
  CsmaPolicy(const Network& net, double sense_range_m);
  std::string name() const override { return "csma"; }
  std::vector<double> rates(long slot, std::span<const double> queues, Rng& rng) override;
  const ConflictGraph& conflict_graph() const { return cg_; }

 private:
  const Network& net_;
  ConflictGraph cg_;
};

class QCsmaPolicy : public SchedulingPolicy {
 public:
  QCsmaPolicy(const Network& net, double sense_range_m, int control_slots);
  std::string name() const override { return "qcsma"; }
  std::vector<double> rates(long slot, std::span<const double> queues, Rng& rng) override;

 private:
  const Network& net_;
  ConflictGraph cg_;
  int control_slots_;
  std::vector<int> schedule_;
};

}  // namespace gibbsnet
