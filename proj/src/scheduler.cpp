#include "gibbsnet/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gibbsnet {

double initial_temperature(const Network& net, std::span<const double> queues, const GibbsConfig& cfg) {
  if (cfg.k0) {
    if (!(*cfg.k0 > 0.0)) throw Error("K0 must be positive");
    return *cfg.k0;
  }
  if (cfg.k0_mode == K0Mode::Penalty) {
    double pmax = 0.0;
    for (int a : net.topo.transmitters()) pmax = std::max(pmax, net.topo.pmax(a));
    return cfg.epsilon * cfg.power_fraction * pmax;
  }
  const double qmax = queues.empty() ? 0.0 : *std::max_element(queues.begin(), queues.end());
  const double rmax = net.table.max_rate();
  // a tiny floor keeps K positive when every queue is empty
  const double floor = 1e-6 * rmax;
  if (cfg.k0_mode == K0Mode::Scaled) return std::max(cfg.kappa * qmax * rmax, floor);
  double delta = 0.0;
  for (double q : queues) delta += q * rmax;
  for (int a : net.topo.transmitters()) delta += cfg.epsilon * net.topo.pmax(a);
  return std::max(2.0 * static_cast<double>(net.num_links()) * delta, floor);
}

GibbsState initial_gibbs_state(const Network& net) {
  GibbsState s;
  const std::size_t n = net.num_links();
  s.vpowers.assign(n, 0.0);
  s.upsilon.resize(n);
  for (std::size_t l = 0; l < n; ++l) s.upsilon[l] = noise_plus_partial_interference(net, static_cast<int>(l), s.vpowers);
  s.queues.assign(n, 0.0);
  s.committed_powers.assign(n, 0.0);
  s.committed_scheme.assign(n, -1);
  s.committed_rates.assign(n, 0.0);
  return s;
}

void begin_super_slot(GibbsState& state, const Network& net, std::span<const double> queues,
                      const GibbsConfig& cfg) {
  state.queues.assign(queues.begin(), queues.end());
  state.t = 0;
  state.schedule.k0 = initial_temperature(net, queues, cfg);
  state.schedule.cap = cfg.anneal_cap.value_or(cfg.super_slot);
}

SlotTrace gibbs_slot(GibbsState& state, const Network& net, double epsilon, int control_slots, Rng& rng,
                     SamplerMode mode) {
  SlotTrace trace;
  trace.temperature = state.schedule(state.t);
  trace.round = generate_decision_set(net, control_slots, rng);
  trace.link_decision_set = select_links(net.topo, trace.round.decision_set, state.vpowers, rng);

  // profiles all read the pre-slot state; members are far enough apart that
  // none affects another's profile
  std::vector<double> fresh;
  fresh.reserve(trace.link_decision_set.size());
  for (int l : trace.link_decision_set) {
    const auto prof = build_profile(net, l, state.vpowers, state.upsilon, state.queues);
    fresh.push_back(sample_power(prof, epsilon, trace.temperature, rng, mode));
  }
  for (std::size_t i = 0; i < fresh.size(); ++i)
    state.vpowers[static_cast<std::size_t>(trace.link_decision_set[i])] = fresh[i];

  // information exchange: Upsilon of every link whose receiver hears a changed transmitter
  std::vector<std::uint8_t> dirty(net.num_links(), 0);
  for (int l : trace.link_decision_set)
    for (int k : net.nbr.affected[static_cast<std::size_t>(l)]) dirty[static_cast<std::size_t>(k)] = 1;
  for (std::size_t k = 0; k < dirty.size(); ++k)
    if (dirty[k]) state.upsilon[k] = noise_plus_partial_interference(net, static_cast<int>(k), state.vpowers);

  trace.new_powers = std::move(fresh);
  ++state.t;
  return trace;
}

bool upsilon_consistent(const GibbsState& state, const Network& net, double rel_tol) {
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const double ref = noise_plus_partial_interference(net, static_cast<int>(l), state.vpowers);
    if (std::abs(ref - state.upsilon[l]) > rel_tol * std::abs(ref)) return false;
  }
  return true;
}

CommitResult commit_real_powers(GibbsState& state, const Network& net) {
  CommitResult out;
  const std::size_t n = net.num_links();
  out.powers = state.vpowers;
  out.schemes.assign(n, -1);
  out.rates.assign(n, 0.0);
  out.virtual_rates.assign(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<int>(l);
    const RateChoice actual = actual_rate(net, li, out.powers);
    const RateChoice virt = virtual_rate(net, li, out.powers);
    out.schemes[l] = actual.scheme ? static_cast<int>(*actual.scheme) : -1;
    out.rates[l] = actual.rate;
    out.virtual_rates[l] = virt.rate;
    if (actual.rate >= virt.rate) ++out.dominated_pairs;
    else ++out.violations;
  }
  state.committed_powers = out.powers;
  state.committed_scheme = out.schemes;
  state.committed_rates = out.rates;
  return out;
}

ConflictGraph build_conflict_graph(const Topology& topo, double sense_range_m) {
  const std::size_t n = topo.num_links();
  ConflictGraph cg;
  cg.adj.assign(n, {});
  cg.matrix.assign(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const Link& a = topo.link(static_cast<int>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const Link& b = topo.link(static_cast<int>(j));
      const bool shared = a.tx == b.tx || a.tx == b.rx || a.rx == b.tx || a.rx == b.rx;
      const bool sensed = topo.distance(a.tx, b.rx) <= sense_range_m || topo.distance(b.tx, a.rx) <= sense_range_m;
      if (shared || sensed) {
        cg.matrix[i][j] = cg.matrix[j][i] = 1;
        cg.adj[i].push_back(static_cast<int>(j));
        cg.adj[j].push_back(static_cast<int>(i));
      }
    }
  }
  return cg;
}

bool is_independent_set(const ConflictGraph& cg, std::span<const int> links) {
  for (std::size_t i = 0; i < links.size(); ++i)
    for (std::size_t j = i + 1; j < links.size(); ++j)
      if (links[i] == links[j] || cg.conflicts(links[i], links[j])) return false;
  return true;
}

bool is_maximal_independent_set(const ConflictGraph& cg, std::span<const int> links,
                                std::span<const std::uint8_t> eligible) {
  if (!is_independent_set(cg, links)) return false;
  std::vector<std::uint8_t> in(cg.size(), 0);
  for (int l : links) in[static_cast<std::size_t>(l)] = 1;
  for (std::size_t k = 0; k < cg.size(); ++k) {
    if (in[k] || !eligible[k]) continue;
    bool blocked = false;
    for (int l : links) blocked = blocked || cg.conflicts(static_cast<int>(k), l);
    if (!blocked) return false;
  }
  return true;
}

std::vector<int> csma_schedule(std::span<const double> queues, const ConflictGraph& cg, Rng& rng) {
  std::vector<int> candidates;
  for (std::size_t l = 0; l < queues.size(); ++l)
    if (queues[l] > 0.0) candidates.push_back(static_cast<int>(l));
  std::vector<std::uint8_t> marked(queues.size(), 0);
  std::vector<int> active;
  while (!candidates.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const int l = candidates[pick(rng)];
    active.push_back(l);
    marked[static_cast<std::size_t>(l)] = 1;
    for (int k : cg.adj[static_cast<std::size_t>(l)]) marked[static_cast<std::size_t>(k)] = 1;
    std::erase_if(candidates, [&](int k) { return marked[static_cast<std::size_t>(k)] != 0; });
  }
  std::sort(active.begin(), active.end());
  return active;
}

double qcsma_activation_probability(double queue) {
  const double w = std::log(0.1 + queue);
  return 1.0 / (1.0 + std::exp(-w));
}

std::vector<int> qcsma_schedule(std::span<const double> queues, const ConflictGraph& cg,
                                std::span<const int> previous, int control_slots, Rng& rng) {
  const std::size_t n = queues.size();
  std::vector<std::uint8_t> on(n, 0);
  for (int l : previous)
    if (queues[static_cast<std::size_t>(l)] > 0.0) on[static_cast<std::size_t>(l)] = 1;

  std::vector<int> contenders;
  for (std::size_t l = 0; l < n; ++l)
    if (queues[l] > 0.0) contenders.push_back(static_cast<int>(l));
  const auto round = contend(contenders, control_slots, [&cg](int a, int b) { return cg.conflicts(a, b); }, rng);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> next = on;
  for (int l : round.decision_set) {
    const auto li = static_cast<std::size_t>(l);
    bool neighbor_on = false;
    for (int k : cg.adj[li]) neighbor_on = neighbor_on || on[static_cast<std::size_t>(k)];
    if (neighbor_on) continue;
    next[li] = unif(rng) < qcsma_activation_probability(queues[li]) ? 1 : 0;
  }
  std::vector<int> out;
  for (std::size_t l = 0; l < n; ++l)
    if (next[l]) out.push_back(static_cast<int>(l));
  return out;
}

std::vector<double> rates_at_full_power(const Network& net, std::span<const int> active) {
  PowerVector p(net.num_links(), 0.0);
  for (int l : active) p[static_cast<std::size_t>(l)] = net.topo.link_pmax(l);
  std::vector<double> r(net.num_links(), 0.0);
  for (int l : active) r[static_cast<std::size_t>(l)] = actual_rate(net, l, p).rate;
  return r;
}

GibbsPolicy::GibbsPolicy(const Network& net, GibbsConfig cfg, bool check_consistency)
    : net_(net), cfg_(cfg), check_(check_consistency), state_(initial_gibbs_state(net)) {
  if (cfg_.super_slot < 1) throw Error("super slot length T must be >= 1");
  if (cfg_.control_slots < 1) throw Error("W must be at least 1");
  if (!(cfg_.epsilon > 0.0)) throw Error("epsilon must be positive");
  if (cfg_.anneal_cap && *cfg_.anneal_cap < 0) throw Error("annealing cap N must be >= 0");
  current_rates_.assign(net.num_links(), 0.0);
}

std::vector<double> GibbsPolicy::rates(long slot, std::span<const double> queues, Rng& rng) {
  const int T = cfg_.super_slot;
  if (slot % T == 0) begin_super_slot(state_, net_, queues, cfg_);
  // transmissions in this slot use the powers committed at the end of the previous super slot
  std::vector<double> out = current_rates_;
  gibbs_slot(state_, net_, cfg_.epsilon, cfg_.control_slots, rng, cfg_.sampler);
  if (check_ && !upsilon_consistent(state_, net_)) ++counters_.upsilon_inconsistencies;
  if (state_.t == T) {
    const CommitResult c = commit_real_powers(state_, net_);
    ++counters_.super_slots;
    counters_.dominated_pairs += c.dominated_pairs;
    counters_.domination_violations += c.violations;
    current_rates_ = c.rates;
    if (on_commit) on_commit(slot, c);
  }
  return out;
}

CsmaPolicy::CsmaPolicy(const Network& net, double sense_range_m)
    : net_(net), cg_(build_conflict_graph(net.topo, sense_range_m)) {}

std::vector<double> CsmaPolicy::rates(long, std::span<const double> queues, Rng& rng) {
  return rates_at_full_power(net_, csma_schedule(queues, cg_, rng));
}

QCsmaPolicy::QCsmaPolicy(const Network& net, double sense_range_m, int control_slots)
    : net_(net), cg_(build_conflict_graph(net.topo, sense_range_m)), control_slots_(control_slots) {
  if (control_slots < 1) throw Error("W must be at least 1");
}

std::vector<double> QCsmaPolicy::rates(long, std::span<const double> queues, Rng& rng) {
  schedule_ = qcsma_schedule(queues, cg_, schedule_, control_slots_, rng);
  return rates_at_full_power(net_, schedule_);
}

}  // namespace gibbsnet
