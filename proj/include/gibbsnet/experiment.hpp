#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gibbsnet/config.hpp"

namespace gibbsnet {

inline constexpr int kResultsSchemaVersion = 1;

struct RunSpec {
  std::size_t index = 0;
  std::string policy;
  double load = 0.0;
  std::uint64_t seed = 0;
};

/// Policy-major, then load, then seed.
std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg);

std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name, const Network& net,
                                              const ExperimentConfig& cfg);
ArrivalSpec arrival_for(const ExperimentConfig& cfg, double load);

struct RunResult {
  RunSpec spec;
  SimMetrics metrics;  // total_queue series dropped unless requested
  double offered_load = 0.0;  // mean total arrivals per slot
};

struct RunOptions {
  bool keep_series = false;
  std::filesystem::path trace_path;  // empty: no per-super-slot trace
};

RunResult execute_run(const Network& net, const ExperimentConfig& cfg, const RunSpec& spec,
                      const RunOptions& opts = {});

std::string results_csv_header();
std::string results_csv_row(const RunResult& r, const std::string& hash);

struct SweepOptions {
  unsigned jobs = 1;
  std::filesystem::path out_dir;
  std::function<void(const RunResult&, std::size_t done, std::size_t total)> on_result;
};

struct SweepOutcome {
  std::vector<RunResult> results;  // plan order
  std::filesystem::path csv_path;
  std::filesystem::path metadata_path;
  std::string hash;
};

/// Runs every planned combination on a worker pool. Rows reach the CSV in
/// plan order through a single writer, so output is byte-identical for any
/// job count.
SweepOutcome run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts);

/// Resolved config, hash, network facts and per-run counters as JSON.
std::string metadata_json(const ExperimentConfig& cfg, const Network& net, const std::vector<RunResult>& results);

/// Offered load (total packets/slot) of the highest swept load below which
/// every seed of the policy was stable; 0 if none.
double supportable_throughput(const std::vector<RunResult>& results, const std::string& policy);

/// Smallest swept load at which some seed of the policy was unstable, if any.
std::optional<double> critical_load(const std::vector<RunResult>& results, const std::string& policy);

}  // namespace gibbsnet
