#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "gibbsnet/phy.hpp"

namespace gibbsnet {

using Rng = std::mt19937_64;

/// Piecewise-constant local weight of an updating link as a function of its
/// own power. Interval i is [breakpoints[i], breakpoints[i+1]); the last one
/// is closed at pmax.
struct LocalWeightProfile {
  int link = -1;
  std::vector<double> breakpoints;
  std::vector<double> weights;
  std::vector<int> affected;               // link ids whose virtual rate depends on this link's power
  std::vector<std::vector<double>> rates;  // rates[i][k]: rate of affected[k] in interval i

  std::size_t num_intervals() const { return weights.size(); }
  double lo(std::size_t i) const { return breakpoints[i]; }
  double hi(std::size_t i) const { return breakpoints[i + 1]; }
  double pmax() const { return breakpoints.back(); }
  std::size_t interval_of(double p) const;
  double weight_at(double p) const { return weights[interval_of(p)]; }
};

/// K_t = K0 / log(2 + min(t, cap)).
struct TemperatureSchedule {
  double k0 = 1.0;
  int cap = 50;

  double operator()(int t) const;
};

double temperature(int t, const TemperatureSchedule& schedule);

/// Power of `updating` at which scheme `scheme` of `affected` stops being
/// feasible, clamped to [0, pmax]. `upsilon` holds current virtual
/// noise+partial-interference per link.
double critical_power(const Network& net, int updating, int affected, std::size_t scheme,
                      std::span<const double> powers, std::span<const double> upsilon);

LocalWeightProfile build_profile(const Network& net, int link, std::span<const double> powers,
                                 std::span<const double> upsilon, std::span<const double> queues);
/// Same, with upsilon recomputed from the powers.
LocalWeightProfile build_profile(const Network& net, int link, std::span<const double> powers,
                                 std::span<const double> queues);

/// log[(e^{-eps lo/K} - e^{-eps hi/K}) e^{V/K}] for every interval.
std::vector<double> interval_log_masses(const LocalWeightProfile& profile, double epsilon, double k);
std::vector<double> interval_probabilities(const LocalWeightProfile& profile, double epsilon, double k);

enum class SamplerMode {
  Exact,
  /// Negative control: uniform instead of truncated-exponential within the interval.
  UniformWithinInterval,
};

/// Draws a power from density proportional to exp((V(p) - eps p)/K):
/// interval first, then inverse-transform inside it.
double sample_power(const LocalWeightProfile& profile, double epsilon, double k, Rng& rng,
                    SamplerMode mode = SamplerMode::Exact);

/// Inverse CDF of the truncated exponential with rate eps/K on [lo, hi].
double truncated_exponential_quantile(double lo, double hi, double rate, double u);

/// Closed-form log of the sampler's density at p.
double log_conditional_density(const LocalWeightProfile& profile, double epsilon, double k, double p);

/// Both sides of  int_0^pmax exp((V(p)-eps p)/K) dp = Z K / eps, each
/// multiplied by exp(-log_scale) to stay finite.
struct NormalizerCheck {
  double numeric = 0.0;
  double closed_form = 0.0;
  double log_scale = 0.0;
  double relative_difference() const;
};

NormalizerCheck normalizer_identity_check(const LocalWeightProfile& profile, double epsilon, double k);

/// (V(p) - eps sum p) / K, with V the global virtual weight.
double stationary_log_density(const Network& net, std::span<const double> powers, std::span<const double> queues,
                              double epsilon, double k);

/// Rows "lo,hi,weight".
std::string profile_csv(const LocalWeightProfile& profile);

}  // namespace gibbsnet
