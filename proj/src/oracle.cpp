#include "gibbsnet/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>

namespace gibbsnet {

double objective(const Network& net, std::span<const double> powers, std::span<const double> queues, double epsilon) {
  return virtual_weight(net, powers, queues) - epsilon * std::accumulate(powers.begin(), powers.end(), 0.0);
}

OracleResult brute_force_optimum(const Network& net, std::span<const double> queues, double epsilon) {
  const std::size_t n = net.num_links();
  if (n > kOracleMaxLinks)
    throw Error("oracle supports at most " + std::to_string(kOracleMaxLinks) + " links, instance has " +
                std::to_string(n) + "; use a smaller topology");
  if (net.table.size() == 0) throw Error("modulation table is empty");
  if (queues.size() != n) throw Error("queue vector has wrong length");

  const int choices = static_cast<int>(net.table.size()) + 1;  // 0 = off
  OracleResult best;
  best.powers.assign(n, 0.0);
  best.objective = objective(net, best.powers, queues, epsilon);
  best.schemes.assign(n, -1);

  std::vector<int> target(n, 0);
  std::vector<int> on;
  on.reserve(n);
  for (;;) {
    ++best.enumerated;
    on.clear();
    bool distinct_tx = true;
    for (std::size_t l = 0; l < n; ++l) {
      if (target[l] == 0) continue;
      for (int k : on) distinct_tx = distinct_tx && net.topo.link(k).tx != net.topo.link(static_cast<int>(l)).tx;
      on.push_back(static_cast<int>(l));
    }
    if (!on.empty() && distinct_tx) {
      // p_l - (gamma_l / g_l) sum_k F_lk p_k = gamma_l nhat_l / g_l
      const auto m = static_cast<Eigen::Index>(on.size());
      Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
      Eigen::VectorXd u(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const int l = on[static_cast<std::size_t>(i)];
        const Link& ln = net.topo.link(l);
        const double c = net.table[static_cast<std::size_t>(target[static_cast<std::size_t>(l)] - 1)].min_sinr /
                         net.topo.link_gain(l);
        u(i) = c * net.nbr.noise_hat[static_cast<std::size_t>(l)];
        for (Eigen::Index j = 0; j < m; ++j) {
          if (i == j) continue;
          const Link& kn = net.topo.link(on[static_cast<std::size_t>(j)]);
          if (net.nbr.is_one_hop(kn.tx, ln.rx)) a(i, j) -= c * net.topo.gain(kn.tx, ln.rx);
        }
      }
      const Eigen::VectorXd p = a.partialPivLu().solve(u);
      bool ok = true;
      PowerVector pw(n, 0.0);
      for (Eigen::Index i = 0; i < m && ok; ++i) {
        const int l = on[static_cast<std::size_t>(i)];
        // a hair above the minimal solution so thresholds are met despite rounding
        const double v = p(i) * (1.0 + 1e-10);
        ok = std::isfinite(v) && v >= 0.0 && v <= net.topo.link_pmax(l);
        pw[static_cast<std::size_t>(l)] = std::min(v, net.topo.link_pmax(l));
      }
      if (ok) {
        ++best.feasible;
        const double obj = objective(net, pw, queues, epsilon);
        if (obj > best.objective) {
          best.objective = obj;
          best.powers = std::move(pw);
        }
      }
    }
    std::size_t d = 0;
    while (d < n && ++target[d] == choices) target[d++] = 0;
    if (d == n) break;
  }
  for (std::size_t l = 0; l < n; ++l) {
    const auto s = virtual_rate(net, static_cast<int>(l), best.powers).scheme;
    best.schemes[l] = s ? static_cast<int>(*s) : -1;
  }
  return best;
}

FrozenRunSummary frozen_super_slots(const Network& net, std::span<const double> queues, const GibbsConfig& cfg,
                                    int runs, std::uint64_t seed) {
  FrozenRunSummary out;
  std::seed_seq seq{seed, std::uint64_t{0xc3}};
  Rng rng(seq);
  for (int r = 0; r < runs; ++r) {
    GibbsState st = initial_gibbs_state(net);
    begin_super_slot(st, net, queues, cfg);
    for (int t = 0; t < cfg.super_slot; ++t) gibbs_slot(st, net, cfg.epsilon, cfg.control_slots, rng, cfg.sampler);
    out.objectives.push_back(objective(net, st.vpowers, queues, cfg.epsilon));
    out.finals.push_back(st.vpowers);
  }
  return out;
}

}  // namespace gibbsnet
