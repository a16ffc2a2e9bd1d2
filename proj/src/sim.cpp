#include "gibbsnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gibbsnet/stats.hpp"

namespace gibbsnet {

double step_queues(std::vector<double>& queues, std::span<const double> rates, std::span<const double> arrivals) {
  if (rates.size() != queues.size() || arrivals.size() != queues.size()) throw Error("queue/rate/arrival size mismatch");
  double served = 0.0;
  for (std::size_t l = 0; l < queues.size(); ++l) {
    if (queues[l] < 0.0 || rates[l] < 0.0 || arrivals[l] < 0.0) throw Error("negative queue, rate or arrival");
    const double s = std::min(queues[l], rates[l]);
    served += s;
    queues[l] = std::max(0.0, queues[l] - rates[l]) + arrivals[l];
  }
  return served;
}

std::vector<double> ring_arrivals(long t, double rho, std::size_t n_links, Rng& rng) {
  if (rho < 0.0 || rho > 1.0) throw Error("rho must lie in [0, 1]");
  if (t < 0) throw Error("slot index must be >= 0");
  std::vector<double> a(n_links, 0.0);
  const auto n = static_cast<long>(n_links);
  a[static_cast<std::size_t>(t % n)] += 1.0;
  a[static_cast<std::size_t>((t + 4) % n)] += 1.0;
  std::bernoulli_distribution coin(rho);
  for (auto& x : a)
    if (coin(rng)) x += 1.0;
  return a;
}

void draw_arrivals(const ArrivalSpec& spec, long t, std::size_t n_links, Rng& rng, std::vector<double>& out) {
  out.assign(n_links, 0.0);
  if (const auto* r = std::get_if<RingDeterministic>(&spec)) {
    out = ring_arrivals(t, r->rho, n_links, rng);
  } else if (const auto* p = std::get_if<PoissonPerLink>(&spec)) {
    if (p->lambda < 0.0) throw Error("lambda must be >= 0");
    if (p->lambda == 0.0) return;
    std::poisson_distribution<int> pois(p->lambda);
    for (auto& x : out) x = pois(rng);
  } else {
    const auto& table = std::get<CustomArrivals>(spec).table;
    if (table.empty()) return;
    const auto& row = table[static_cast<std::size_t>(t) % table.size()];
    if (row.size() != n_links) throw Error("custom arrival row has wrong length");
    out = row;
  }
}

double mean_total_arrival_rate(const ArrivalSpec& spec, std::size_t n_links) {
  const auto n = static_cast<double>(n_links);
  if (const auto* r = std::get_if<RingDeterministic>(&spec)) return 2.0 + n * r->rho;
  if (const auto* p = std::get_if<PoissonPerLink>(&spec)) return n * p->lambda;
  const auto& table = std::get<CustomArrivals>(spec).table;
  if (table.empty()) return 0.0;
  double s = 0.0;
  for (const auto& row : table) s += std::accumulate(row.begin(), row.end(), 0.0);
  return s / static_cast<double>(table.size());
}

std::string to_string(Verdict v) { return v == Verdict::Stable ? "stable" : "unstable"; }

Verdict stability_verdict(std::span<const double> total_queue, const StabilityThresholds& th) {
  if (total_queue.size() < th.min_length)
    throw Error("series too short for a stability verdict (" + std::to_string(total_queue.size()) + " < " +
                std::to_string(th.min_length) + ")");
  const std::size_t half = total_queue.size() / 2;
  const auto fit = stats::linear_fit(total_queue.subspan(half), static_cast<double>(half));
  return fit.slope > th.max_slope && fit.r2 > th.min_r2 ? Verdict::Unstable : Verdict::Stable;
}

double time_average(std::span<const double> series, double warmup_fraction) {
  if (series.empty()) return 0.0;
  auto skip = static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(series.size())));
  skip = std::min(skip, series.size() - 1);
  const auto tail = series.subspan(skip);
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
}

SimMetrics run_simulation(const Network& net, SchedulingPolicy& policy, const ArrivalSpec& arrivals,
                          const SimOptions& opts) {
  if (opts.horizon < 1) throw Error("horizon must be >= 1 slot");
  if (opts.warmup_fraction < 0.0 || opts.warmup_fraction >= 1.0) throw Error("warm-up fraction must lie in [0, 1)");
  const std::size_t n = net.num_links();
  std::seed_seq seq_arr{opts.seed, std::uint64_t{0xa1}};
  std::seed_seq seq_pol{opts.seed, std::uint64_t{0xb2}};
  Rng arr_rng(seq_arr);
  Rng pol_rng(seq_pol);

  SimMetrics m;
  m.seed = opts.seed;
  m.total_queue.reserve(static_cast<std::size_t>(opts.horizon));
  m.per_link_throughput.assign(n, 0.0);
  const auto warm = static_cast<long>(std::floor(opts.warmup_fraction * static_cast<double>(opts.horizon)));

  std::vector<double> q(n, 0.0), a;
  for (long t = 0; t < opts.horizon; ++t) {
    draw_arrivals(arrivals, t, n, arr_rng, a);
    const std::vector<double> r = policy.rates(t, q, pol_rng);
    if (t >= warm)
      for (std::size_t l = 0; l < n; ++l) m.per_link_throughput[l] += std::min(q[l], r[l]);
    m.departures += step_queues(q, r, a);
    m.arrivals += std::accumulate(a.begin(), a.end(), 0.0);
    m.total_queue.push_back(std::accumulate(q.begin(), q.end(), 0.0));
  }
  const auto measured = static_cast<double>(opts.horizon - warm);
  for (auto& x : m.per_link_throughput) x /= measured;
  m.throughput = std::accumulate(m.per_link_throughput.begin(), m.per_link_throughput.end(), 0.0);
  m.avg_total_queue = time_average(m.total_queue, opts.warmup_fraction);
  m.final_total_queue = m.total_queue.back();
  if (m.total_queue.size() >= opts.stability.min_length) m.verdict = stability_verdict(m.total_queue, opts.stability);
  m.counters = policy.counters();
  return m;
}

}  // namespace gibbsnet
