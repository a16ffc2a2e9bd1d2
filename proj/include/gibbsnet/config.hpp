#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gibbsnet/scheduler.hpp"
#include "gibbsnet/sim.hpp"

namespace gibbsnet {

/// Config problem with a 1-based source line (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct TopologySpec {
  std::string kind = "ring";  // ring | random | example | file
  RingParams ring;
  RandomParams random;
  std::filesystem::path file;
  double one_hop_range_m = 100.0;   // alpha = range^(-exponent)
  std::optional<double> alpha;      // explicit linear threshold
};

struct ModulationSpec {
  std::string kind = "ieee80211g";  // ieee80211g | bpsk_qpsk | custom
  double slot_s = 1e-3;
  double packet_bits = 12000.0;
  std::vector<ModulationScheme> custom;
};

struct ArrivalSweep {
  std::string kind = "ring";  // ring (rho) | poisson (lambda per link)
  std::vector<double> loads;
};

struct ExperimentConfig {
  std::string name;
  std::filesystem::path source;
  TopologySpec topology;
  ModulationSpec modulation;
  std::vector<std::string> policies{"gibbs"};
  GibbsConfig gibbs;
  int qcsma_control_slots = 32;
  std::optional<double> sense_range_m;  // defaults to the topology's carrier-sense range
  ArrivalSweep arrivals;
  long horizon_slots = 100000;
  std::vector<std::uint64_t> seeds{1};
  double warmup_fraction = 0.1;
  StabilityThresholds stability;
  std::filesystem::path output_dir;
  bool trace_super_slots = false;
  // oracle / frozen-queue runs
  std::vector<double> oracle_queues;
  int oracle_runs = 100;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical YAML of every resolved field (output_dir excluded).
std::string resolved_config_yaml(const ExperimentConfig& cfg);
/// FNV-1a 64 of the resolved YAML, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

ModulationTable build_modulation_table(const ModulationSpec& spec);
Topology build_topology(const ExperimentConfig& cfg);
double resolved_alpha(const ExperimentConfig& cfg, const Topology& topo);
Network build_network(const ExperimentConfig& cfg);

/// Topology files: nodes, links, per-node pmax/noise and either an explicit
/// gain matrix or a path-loss exponent.
Topology parse_topology_file(const std::string& text, const std::string& source_name = "<string>");
std::string topology_to_yaml(const Topology& topo);
std::string modulation_to_yaml(const ModulationTable& table);

}  // namespace gibbsnet
