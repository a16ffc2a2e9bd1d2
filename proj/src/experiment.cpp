#include "gibbsnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gibbsnet {

std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg) {
  std::vector<RunSpec> out;
  for (const auto& p : cfg.policies)
    for (double load : cfg.arrivals.loads)
      for (auto seed : cfg.seeds) out.push_back({out.size(), p, load, seed});
  return out;
}

namespace {

double sense_range(const Network& net, const ExperimentConfig& cfg) {
  if (cfg.sense_range_m) return *cfg.sense_range_m;
  if (net.topo.carrier_sense_m) return *net.topo.carrier_sense_m;
  throw Error("csma/qcsma need a carrier-sense range: set sense_range_m or use a topology that records one");
}

}  // namespace

std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name, const Network& net,
                                              const ExperimentConfig& cfg) {
  if (name == "gibbs") return std::make_unique<GibbsPolicy>(net, cfg.gibbs);
  if (name == "csma") return std::make_unique<CsmaPolicy>(net, sense_range(net, cfg));
  if (name == "qcsma") return std::make_unique<QCsmaPolicy>(net, sense_range(net, cfg), cfg.qcsma_control_slots);
  throw Error("unknown policy '" + name + "'");
}

ArrivalSpec arrival_for(const ExperimentConfig& cfg, double load) {
  if (cfg.arrivals.kind == "ring") return RingDeterministic{load};
  return PoissonPerLink{load};
}

RunResult execute_run(const Network& net, const ExperimentConfig& cfg, const RunSpec& spec,
                      const RunOptions& opts) {
  auto policy = make_policy(spec.policy, net, cfg);
  std::ofstream trace;
  if (!opts.trace_path.empty()) {
    if (auto* g = dynamic_cast<GibbsPolicy*>(policy.get())) {
      trace.open(opts.trace_path);
      if (!trace) throw Error("cannot write trace " + opts.trace_path.string());
      trace.precision(17);
      trace << "slot,link,power,scheme,rate,virtual_rate\n";
      g->on_commit = [&trace](long slot, const CommitResult& c) {
        for (std::size_t l = 0; l < c.powers.size(); ++l)
          trace << slot << ',' << l << ',' << c.powers[l] << ',' << c.schemes[l] << ',' << c.rates[l] << ','
                << c.virtual_rates[l] << '\n';
      };
    }
  }
  SimOptions so;
  so.horizon = cfg.horizon_slots;
  so.seed = spec.seed;
  so.warmup_fraction = cfg.warmup_fraction;
  so.stability = cfg.stability;
  const ArrivalSpec arr = arrival_for(cfg, spec.load);

  RunResult r;
  r.spec = spec;
  r.metrics = run_simulation(net, *policy, arr, so);
  r.metrics.config_hash = config_hash(cfg);
  r.offered_load = mean_total_arrival_rate(arr, net.num_links());
  if (!opts.keep_series) {
    r.metrics.total_queue.clear();
    r.metrics.total_queue.shrink_to_fit();
  }
  return r;
}

std::string results_csv_header() {
  return "# gibbsnet results schema_version=" + std::to_string(kResultsSchemaVersion) +
         "\npolicy,load,seed,avg_total_queue,verdict,throughput,offered_load,domination_violations,config_hash\n";
}

std::string results_csv_row(const RunResult& r, const std::string& hash) {
  std::ostringstream out;
  out.precision(10);
  const auto& m = r.metrics;
  out << r.spec.policy << ',' << r.spec.load << ',' << r.spec.seed << ',' << m.avg_total_queue << ','
      << (m.verdict ? to_string(*m.verdict) : std::string("n/a")) << ',' << m.throughput << ',' << r.offered_load
      << ',' << m.counters.domination_violations << ',' << hash << '\n';
  return out.str();
}

std::string metadata_json(const ExperimentConfig& cfg, const Network& net, const std::vector<RunResult>& results) {
  nlohmann::json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["config_hash"] = config_hash(cfg);
  j["resolved_config"] = resolved_config_yaml(cfg);
  j["source"] = cfg.source.string();
  j["network"] = {{"links", net.num_links()},
                  {"nodes", net.topo.num_nodes()},
                  {"alpha", net.nbr.alpha},
                  {"noise_mw", net.topo.noise_all().empty() ? 0.0 : net.topo.noise_all().front()},
                  {"max_rate_packets_per_slot", net.table.max_rate()}};
  auto& runs = j["runs"] = nlohmann::json::array();
  long dominated = 0, violations = 0;
  for (const auto& r : results) {
    const auto& c = r.metrics.counters;
    dominated += c.dominated_pairs;
    violations += c.domination_violations;
    runs.push_back({{"policy", r.spec.policy},
                    {"load", r.spec.load},
                    {"seed", r.spec.seed},
                    {"super_slots", c.super_slots},
                    {"dominated_pairs", c.dominated_pairs},
                    {"domination_violations", c.domination_violations},
                    {"arrivals", r.metrics.arrivals},
                    {"departures", r.metrics.departures},
                    {"final_total_queue", r.metrics.final_total_queue}});
  }
  j["domination"] = {{"checked_pairs", dominated + violations}, {"violations", violations}};
  return j.dump(2) + "\n";
}

SweepOutcome run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
  const Network net = build_network(cfg);
  const auto plan = plan_runs(cfg);
  SweepOutcome out;
  out.hash = config_hash(cfg);
  std::filesystem::create_directories(opts.out_dir);
  out.csv_path = opts.out_dir / (cfg.name + "-" + out.hash + ".csv");
  out.metadata_path = opts.out_dir / (cfg.name + "-" + out.hash + ".json");

  std::ofstream csv(out.csv_path);
  if (!csv) throw Error("cannot write " + out.csv_path.string());
  csv << results_csv_header();

  std::vector<RunResult> results(plan.size());
  std::vector<std::uint8_t> ready(plan.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      RunOptions ro;
      if (cfg.trace_super_slots && plan[i].policy == "gibbs") {
        std::ostringstream name;
        name << cfg.name << "-" << out.hash << "-trace-" << plan[i].load << "-" << plan[i].seed << ".csv";
        ro.trace_path = opts.out_dir / name.str();
      }
      try {
        RunResult r = execute_run(net, cfg, plan[i], ro);
        std::lock_guard lock(mu);
        results[i] = std::move(r);
        ready[i] = 1;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        ready[i] = 2;
        next.store(plan.size());
      }
      cv.notify_one();
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(plan.size())));
  std::vector<std::jthread> pool;
  for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);

  // single writer: emit the completed prefix in plan order
  std::size_t written = 0;
  while (written < plan.size()) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return ready[written] != 0 || failure; });
    if (failure) break;
    while (written < plan.size() && ready[written] == 1) {
      csv << results_csv_row(results[written], out.hash);
      csv.flush();
      if (opts.on_result) opts.on_result(results[written], written + 1, plan.size());
      ++written;
    }
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  std::ofstream meta(out.metadata_path);
  if (!meta) throw Error("cannot write " + out.metadata_path.string());
  meta << metadata_json(cfg, net, results);
  out.results = std::move(results);
  return out;
}

double supportable_throughput(const std::vector<RunResult>& results, const std::string& policy) {
  std::map<double, std::pair<bool, double>> by_load;  // load -> (all stable, offered)
  for (const auto& r : results) {
    if (r.spec.policy != policy) continue;
    auto [it, fresh] = by_load.try_emplace(r.spec.load, true, r.offered_load);
    it->second.first = it->second.first && r.metrics.verdict == Verdict::Stable;
  }
  // stop at the first load with an unstable seed
  double best = 0.0;
  for (const auto& [load, v] : by_load) {
    if (!v.first) break;
    best = std::max(best, v.second);
  }
  return best;
}

std::optional<double> critical_load(const std::vector<RunResult>& results, const std::string& policy) {
  std::optional<double> out;
  for (const auto& r : results)
    if (r.spec.policy == policy && r.metrics.verdict == Verdict::Unstable && (!out || r.spec.load < *out))
      out = r.spec.load;
  return out;
}

}  // namespace gibbsnet
