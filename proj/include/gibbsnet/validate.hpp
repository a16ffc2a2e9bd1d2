#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gibbsnet/gibbs.hpp"
#include "gibbsnet/phy.hpp"

namespace gibbsnet {

/// The worked example: links ab, cd, ef, gh with p = (15, 0, 10, 0) and
/// queues (10, 100, 10, 0); link cd is the updating link.
struct ExampleFixture {
  Network net;
  PowerVector powers;
  std::vector<double> queues;
  int updating = 1;
};
ExampleFixture example_fixture();

/// Three links on a line; links 0 and 2 share no one- or two-hop neighbor,
/// link 1 hears link 0.
Network line_network();

struct SuiteCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;      // p-value, error, or probability
  double threshold = 0.0;  // what value was compared against
  long samples = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;
  double seconds = 0.0;
  bool passed() const;
};

struct ValidateOptions {
  std::uint64_t seed = 20240601;
  long density_samples = 1000000;
  long balance_pairs = 1000;
  long decision_rounds = 1000000;
  long independence_rounds = 200000;
  long min_interval_samples = 100;  // smaller intervals skip the KS test
  bool mutate_sampler = false;      // negative control
};

/// Chi-square over intervals and KS within each interval at (K=5, eps=0.1)
/// and (K=0.5, eps=0.01); expected interval masses come from quadrature.
SuiteReport sampler_density_suite(const ValidateOptions& opts);
/// log pi(p) + sum log f(p'|p) == log pi(p') + sum log f(p|p') on the line network.
SuiteReport detailed_balance_suite(const ValidateOptions& opts);
/// Validity, the 0.18/(d+1) lower bound and power independence on the 9-link ring.
SuiteReport decision_set_suite(const ValidateOptions& opts);
/// Quadrature vs closed form of the local normalizer.
SuiteReport normalizer_suite(const ValidateOptions& opts);

std::vector<SuiteReport> run_validation(const ValidateOptions& opts);
std::string validation_json(const std::vector<SuiteReport>& reports, const ValidateOptions& opts);

inline constexpr double kDecisionSetC1 = 0.18;

}  // namespace gibbsnet
