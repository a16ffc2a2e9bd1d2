#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gibbsnet/sim.hpp"

using namespace gibbsnet;

namespace {

Network ring9() {
  RingParams rp;
  return make_network(ring_topology(rp), default_alpha(), ModulationTable::ieee80211g());
}

}  // namespace

TEST_CASE("queue update law") {
  std::vector<double> q{10, 1, 3};
  const double served = step_queues(q, std::vector<double>{4.5, 4.5, 0}, std::vector<double>{2, 0, 1});
  CHECK(q == std::vector<double>{7.5, 0, 4});
  CHECK(served == doctest::Approx(5.5));
  CHECK_THROWS_AS(step_queues(q, std::vector<double>{-1, 0, 0}, std::vector<double>{0, 0, 0}), Error);
  CHECK_THROWS_AS(step_queues(q, std::vector<double>{0, 0, 0}, std::vector<double>{0, -2, 0}), Error);
}

TEST_CASE("ring arrivals") {
  Rng rng(1);
  const auto a0 = ring_arrivals(0, 0.0, 9, rng);
  CHECK(a0 == std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 0});
  const auto a7 = ring_arrivals(7, 0.0, 9, rng);
  CHECK(a7[7] == 1.0);
  CHECK(a7[2] == 1.0);
  for (long t = 0; t < 100; ++t) {
    const auto a = ring_arrivals(t, 0.0, 9, rng);
    CHECK(std::accumulate(a.begin(), a.end(), 0.0) == 2.0);
  }
  const long n = 1000000;
  double total = 0.0;
  for (long t = 0; t < n; ++t) {
    const auto a = ring_arrivals(t, 0.25, 9, rng);
    total += std::accumulate(a.begin(), a.end(), 0.0);
  }
  const double sigma = std::sqrt(9 * 0.25 * 0.75 / n);
  CHECK(std::abs(total / n - 4.25) < 3 * sigma);
  CHECK_THROWS_AS(ring_arrivals(0, 1.5, 9, rng), Error);
  CHECK(mean_total_arrival_rate(RingDeterministic{0.25}, 9) == doctest::Approx(4.25));
  CHECK(mean_total_arrival_rate(PoissonPerLink{0.3}, 50) == doctest::Approx(15.0));
}

TEST_CASE("custom arrivals cycle through the table") {
  Rng rng(2);
  const CustomArrivals c{{{1, 0}, {0, 2}}};
  std::vector<double> out(2);
  draw_arrivals(c, 3, 2, rng, out);
  CHECK(out == std::vector<double>{0, 2});
  draw_arrivals(c, 4, 2, rng, out);
  CHECK(out == std::vector<double>{1, 0});
  CHECK(mean_total_arrival_rate(c, 2) == doctest::Approx(1.5));
}

TEST_CASE("stability verdict") {
  CHECK(stability_verdict(std::vector<double>(20000, 5.0)) == Verdict::Stable);
  std::vector<double> lin(20000);
  for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = static_cast<double>(i);
  CHECK(stability_verdict(lin) == Verdict::Unstable);
  // noisy but flat
  std::vector<double> saw(20000);
  for (std::size_t i = 0; i < saw.size(); ++i) saw[i] = static_cast<double>(i % 500);
  CHECK(stability_verdict(saw) == Verdict::Stable);
  CHECK_THROWS_AS(stability_verdict(std::vector<double>(9999, 1.0)), Error);
  StabilityThresholds loose;
  loose.max_slope = 2.0;
  CHECK(stability_verdict(lin, loose) == Verdict::Stable);
  CHECK(to_string(Verdict::Stable) == "stable");
  CHECK(to_string(Verdict::Unstable) == "unstable");
}

TEST_CASE("time average skips the warm-up") {
  std::vector<double> s{100, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(time_average(s, 0.1) == doctest::Approx(1.0));
  CHECK(time_average(s, 0.0) == doctest::Approx(10.9));
}

TEST_CASE("simulation conserves packets and is reproducible") {
  const auto net = ring9();
  SimOptions opts;
  opts.horizon = 12000;
  opts.seed = 4;
  for (const char* which : {"csma", "gibbs"}) {
    auto run = [&]() {
      std::unique_ptr<SchedulingPolicy> pol;
      if (std::string(which) == "csma") pol = std::make_unique<CsmaPolicy>(net, 40.0);
      else pol = std::make_unique<GibbsPolicy>(net, GibbsConfig{});
      return run_simulation(net, *pol, RingDeterministic{0.12}, opts);
    };
    const auto a = run(), b = run();
    CHECK(a.total_queue == b.total_queue);
    CHECK(a.avg_total_queue == b.avg_total_queue);
    CHECK(a.arrivals - a.departures == doctest::Approx(a.final_total_queue).epsilon(1e-12));
    CHECK(std::abs(a.arrivals - a.departures - a.final_total_queue) < 1e-9 * std::max(1.0, a.arrivals));
    CHECK(a.total_queue.size() == 12000);
    for (double x : a.total_queue) CHECK(x >= 0.0);
    CHECK(a.verdict.has_value());
    CHECK(a.avg_total_queue == doctest::Approx(time_average(a.total_queue, 0.1)));
    CHECK(a.seed == 4);
    CHECK(a.counters.domination_violations == 0);
  }
  SimOptions bad = opts;
  bad.horizon = 0;
  CsmaPolicy pol(net, 40.0);
  CHECK_THROWS_AS(run_simulation(net, pol, RingDeterministic{0.1}, bad), Error);
}

TEST_CASE("policies see the same arrivals") {
  const auto net = ring9();
  SimOptions opts;
  opts.horizon = 5000;
  opts.seed = 21;
  CsmaPolicy c(net, 40.0);
  QCsmaPolicy q(net, 40.0, 32);
  const auto a = run_simulation(net, c, RingDeterministic{0.2}, opts);
  const auto b = run_simulation(net, q, RingDeterministic{0.2}, opts);
  CHECK(a.arrivals == b.arrivals);
  CHECK(!a.verdict.has_value());
}
