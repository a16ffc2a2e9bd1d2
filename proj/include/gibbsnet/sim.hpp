#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gibbsnet/scheduler.hpp"

namespace gibbsnet {

/// q <- [q - r]^+ + A in place; returns the total served, sum min(q, r).
double step_queues(std::vector<double>& queues, std::span<const double> rates, std::span<const double> arrivals);

/// One packet to links t mod n and (t+4) mod n, plus a Bernoulli(rho) packet per link.
struct RingDeterministic {
  double rho = 0.0;
};
/// Poisson(lambda) packets per link per slot.
struct PoissonPerLink {
  double lambda = 0.0;
};
/// Row t mod rows is the arrival vector of slot t.
struct CustomArrivals {
  std::vector<std::vector<double>> table;
};
using ArrivalSpec = std::variant<RingDeterministic, PoissonPerLink, CustomArrivals>;

std::vector<double> ring_arrivals(long t, double rho, std::size_t n_links, Rng& rng);
void draw_arrivals(const ArrivalSpec& spec, long t, std::size_t n_links, Rng& rng, std::vector<double>& out);
double mean_total_arrival_rate(const ArrivalSpec& spec, std::size_t n_links);

struct StabilityThresholds {
  double max_slope = 0.01;  // packets per slot
  double min_r2 = 0.5;
  std::size_t min_length = 10000;
};

enum class Verdict { Stable, Unstable };
std::string to_string(Verdict v);

/// Linear trend over the second half of the series.
Verdict stability_verdict(std::span<const double> total_queue, const StabilityThresholds& th = {});

struct SimOptions {
  long horizon = 0;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;
  StabilityThresholds stability;
};

struct SimMetrics {
  std::vector<double> total_queue;  // after each slot
  double avg_total_queue = 0.0;     // warm-up excluded
  std::vector<double> per_link_throughput;
  double throughput = 0.0;  // packets per slot, warm-up excluded
  std::optional<Verdict> verdict;  // absent when the run is too short
  double arrivals = 0.0;
  double departures = 0.0;
  double final_total_queue = 0.0;
  PolicyCounters counters;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Deterministic given the seed. Arrivals and policy decisions draw from
/// separate streams, so policies see identical arrival sequences.
SimMetrics run_simulation(const Network& net, SchedulingPolicy& policy, const ArrivalSpec& arrivals,
                          const SimOptions& opts);

/// Mean of the series after the warm-up prefix.
double time_average(std::span<const double> series, double warmup_fraction);

}  // namespace gibbsnet
