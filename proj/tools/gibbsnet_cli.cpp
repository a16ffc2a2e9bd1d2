// gibbsnet command-line driver: run sweeps, print oracle tables, run the
// statistical validation suites, list presets.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "gibbsnet/config.hpp"
#include "gibbsnet/experiment.hpp"
#include "gibbsnet/oracle.hpp"
#include "gibbsnet/validate.hpp"

namespace fs = std::filesystem;
using namespace gibbsnet;

namespace {

fs::path preset_dir() {
  if (const char* env = std::getenv("GIBBSNET_PRESETS")) return env;
  return GIBBSNET_PRESET_DIR;
}

/// A path that exists, else a preset of that name (with or without .cfg).
fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const fs::path& cand : {preset_dir() / arg, preset_dir() / (arg + ".cfg")})
    if (fs::exists(cand)) return cand;
  throw Error("no such config or preset: " + arg + " (see `gibbsnet presets`)");
}

fs::path output_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GIBBSNET_OUT")) return fs::path(env) / cfg.name;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return fs::path("results") / cfg.name;
}

std::string link_name(const Topology& topo, int l) {
  const auto& a = topo.nodes()[static_cast<std::size_t>(topo.link(l).tx)].label;
  const auto& b = topo.nodes()[static_cast<std::size_t>(topo.link(l).rx)].label;
  if (a.size() == 1 && b.size() == 1) return "(" + a + b + ")";
  return "l" + std::to_string(l);
}

std::string scheme_name(const Network& net, int s) { return s < 0 ? "off" : net.table[static_cast<std::size_t>(s)].name; }

int cmd_run(const std::string& arg, std::optional<std::uint64_t> seed, const std::string& out, unsigned jobs,
            bool dry_run) {
  auto cfg = load_config(resolve_config(arg));
  if (seed) cfg.seeds = {*seed};
  const auto dir = output_dir(out, cfg);
  const auto plan = plan_runs(cfg);
  if (dry_run) {
    std::cout << resolved_config_yaml(cfg);
    std::cout << "# config_hash: " << config_hash(cfg) << "\n# output_dir: " << dir.string() << "\n# planned runs: "
              << plan.size() << "\n";
    for (const auto& r : plan) std::cout << "#   " << r.policy << " load=" << r.load << " seed=" << r.seed << "\n";
    return 0;
  }
  SweepOptions so;
  so.jobs = jobs;
  so.out_dir = dir;
  so.on_result = [](const RunResult& r, std::size_t done, std::size_t total) {
    std::cerr << "[" << done << "/" << total << "] " << r.spec.policy << " load=" << r.spec.load
              << " seed=" << r.spec.seed << " avg_q=" << r.metrics.avg_total_queue << " "
              << (r.metrics.verdict ? to_string(*r.metrics.verdict) : "n/a") << "\n";
  };
  const auto res = run_sweep(cfg, so);
  long violations = 0;
  for (const auto& r : res.results) violations += r.metrics.counters.domination_violations;
  std::cout << "results:  " << res.csv_path.string() << "\nmetadata: " << res.metadata_path.string() << "\n";
  for (const auto& p : cfg.policies) {
    std::cout << p << ": supportable throughput " << supportable_throughput(res.results, p) << " packets/slot";
    if (auto c = critical_load(res.results, p)) std::cout << ", first unstable load " << *c;
    std::cout << "\n";
  }
  if (violations > 0) {
    std::cerr << "domination violations: " << violations << "\n";
    return 3;
  }
  return 0;
}

int cmd_oracle(const std::string& arg, std::optional<std::uint64_t> seed) {
  const auto cfg = load_config(resolve_config(arg));
  const Network net = build_network(cfg);
  if (net.num_links() > kOracleMaxLinks) {
    std::cerr << "error: oracle enumerates all scheme vectors and is limited to " << kOracleMaxLinks
              << " links; this instance has " << net.num_links()
              << ". Use a smaller topology (e.g. a ring with n_links <= 6) or `gibbsnet run` for large networks.\n";
    return 2;
  }
  std::vector<double> q = cfg.oracle_queues;
  if (q.empty()) q.assign(net.num_links(), 10.0);
  if (q.size() != net.num_links()) throw Error("oracle.queues_packets needs one entry per link");
  const double eps = cfg.gibbs.epsilon;
  const auto best = brute_force_optimum(net, q, eps);

  std::cout << std::setprecision(8);
  std::cout << "brute-force optimum of sum q r~ - eps sum p (eps=" << eps << ")\n";
  std::cout << "link      queue        power  scheme   virtual_rate\n";
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const auto li = static_cast<int>(l);
    std::cout << std::left << std::setw(8) << link_name(net.topo, li) << std::right << std::setw(7) << q[l]
              << std::setw(13) << best.powers[l] << "  " << std::left << std::setw(8)
              << scheme_name(net, best.schemes[l]) << std::right << std::setw(8)
              << virtual_rate(net, li, best.powers).rate << "\n";
  }
  std::cout << "objective " << best.objective << "  (" << best.enumerated << " scheme vectors, " << best.feasible
            << " feasible)\n";
  std::cout << "optimum:";
  for (std::size_t l = 0; l < net.num_links(); ++l)
    if (best.powers[l] > 0.0) std::cout << " " << link_name(net.topo, static_cast<int>(l)) << "=" << best.powers[l];
  std::cout << "\n\n";

  const auto runs = frozen_super_slots(net, q, cfg.gibbs, cfg.oracle_runs, seed.value_or(cfg.seeds.front()));
  std::map<std::string, int> hist;
  int within = 0;
  for (std::size_t r = 0; r < runs.finals.size(); ++r) {
    std::string key;
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      const auto s = virtual_rate(net, static_cast<int>(l), runs.finals[r]).scheme;
      key += (l ? " " : "") + link_name(net.topo, static_cast<int>(l)) + ":" +
             scheme_name(net, s ? static_cast<int>(*s) : -1);
    }
    ++hist[key];
    if (runs.objectives[r] >= best.objective - 0.05 * std::abs(best.objective)) ++within;
  }
  std::cout << "gibbs: " << cfg.oracle_runs << " frozen-queue super slots of " << cfg.gibbs.super_slot
            << " slots, K0 = " << initial_temperature(net, q, cfg.gibbs) << "\n";
  for (const auto& [k, c] : hist) std::cout << "  " << std::setw(5) << c << "  " << k << "\n";
  std::cout << "within 5% of optimum: " << within << "/" << cfg.oracle_runs << "\n";
  return 0;
}

int cmd_validate(std::uint64_t seed, bool mutate, bool quick, const std::string& out) {
  ValidateOptions vo;
  vo.seed = seed;
  vo.mutate_sampler = mutate;
  if (quick) {
    vo.density_samples = 100000;
    vo.decision_rounds = 100000;
    vo.independence_rounds = 50000;
    vo.balance_pairs = 200;
  }
  const auto reports = run_validation(vo);
  bool all = true;
  for (const auto& r : reports) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.suite << " (" << std::fixed << std::setprecision(2)
              << r.seconds << " s)\n";
    std::cout.unsetf(std::ios::fixed);
    for (const auto& c : r.checks)
      std::cout << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << " value=" << std::setprecision(6) << c.value
                << " threshold=" << c.threshold << " n=" << c.samples << "\n";
    all = all && r.passed();
  }
  const std::string json = validation_json(reports, vo);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << json;
  }
  return all ? 0 : 1;
}

int cmd_presets(const std::string& show) {
  const auto dir = preset_dir();
  if (!show.empty()) {
    std::ifstream in(resolve_config(show));
    std::cout << in.rdbuf();
    return 0;
  }
  if (!fs::exists(dir)) throw Error("preset directory not found: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  std::cout << "presets in " << dir.string() << ":\n";
  for (const auto& n : names) std::cout << "  " << n << "\n";
  return 0;
}

int cmd_profile(const std::string& out) {
  const auto fx = example_fixture();
  const auto csv = profile_csv(build_profile(fx.net, fx.updating, fx.powers, fx.queues));
  if (out.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << csv;
  return 0;
}

int cmd_topology(const std::string& arg, const std::string& out) {
  const auto cfg = load_config(resolve_config(arg));
  const auto csv = topology_csv(build_topology(cfg));
  if (out.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gibbsnet: annealed-Gibbs power and modulation control simulator"};
  app.require_subcommand(1);

  std::string cfg_arg, out;
  std::uint64_t seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool dry_run = false, mutate = false, quick = false;
  std::string show;

  auto* run = app.add_subcommand("run", "run every (policy, load, seed) of a config");
  run->add_option("config", cfg_arg, "config file or preset name")->required();
  auto* run_seed = run->add_option("--seed", seed, "replace the config's seed list with one seed");
  run->add_option("--out", out, "output directory (default: $GIBBSNET_OUT/<name>, then output_dir)");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--dry-run", dry_run, "print the resolved config and planned runs only");

  auto* oracle = app.add_subcommand("oracle", "brute-force optimum and Gibbs final-state distribution");
  oracle->add_option("config", cfg_arg, "config file or preset name")->required();
  auto* oracle_seed = oracle->add_option("--seed", seed, "seed for the Gibbs runs");

  auto* validate = app.add_subcommand("validate", "statistical test suites for the sampler and MAC");
  validate->add_option("--seed", seed, "base seed")->default_val(20240601);
  validate->add_flag("--mutate-sampler", mutate, "negative control: uniform draw within the chosen interval");
  validate->add_flag("--quick", quick, "fewer samples");
  validate->add_option("--out", out, "write the JSON report here");

  auto* presets = app.add_subcommand("presets", "list shipped presets");
  presets->add_option("--show", show, "print one preset");

  auto* profile = app.add_subcommand("profile", "dump the worked-example local weight profile as CSV");
  profile->add_option("--out", out, "output file (default stdout)");

  auto* topo = app.add_subcommand("topology", "dump node positions of a config's topology as CSV");
  topo->add_option("config", cfg_arg, "config file or preset name")->required();
  topo->add_option("--out", out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run)
      return cmd_run(cfg_arg, *run_seed ? std::optional<std::uint64_t>(seed) : std::nullopt, out, jobs, dry_run);
    if (*oracle) return cmd_oracle(cfg_arg, *oracle_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (*validate) return cmd_validate(seed, mutate, quick, out);
    if (*presets) return cmd_presets(show);
    if (*profile) return cmd_profile(out);
    if (*topo) return cmd_topology(cfg_arg, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
