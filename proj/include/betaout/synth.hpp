#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "betaout/posterior.hpp"

namespace betaout {

/// SplitMix64 (Steele, Lea & Flood 2014). State advances by the golden-gamma
/// constant 0x9E3779B97F4A7C15; output mix uses the constants 0xBF58476D1CE4E5B9
/// and 0x94D049BB133111EB with shifts 30, 27, 31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Top 53 bits scaled by 2^-53: uniform on [0, 1).
  double uniform01();

 private:
  std::uint64_t state_;
};

/// Smallest x in [0, trials] with P(X <= x) >= u for X ~ Binomial(trials, p).
/// The CDF is evaluated as I_{1-p}(trials - x, x + 1) and searched by bisection.
std::int64_t binomial_inverse_cdf(std::int64_t trials, double p, double u);

struct Arm {
  std::int64_t trials = 1;
  std::optional<double> bias_theta;
  std::optional<std::string> label;  // defaults to "arm<i>" (1-based)

  friend bool operator==(const Arm&, const Arm&) = default;
};

struct CampaignSpec {
  double true_theta = 0.5;
  std::vector<Arm> arms;
  std::uint64_t seed = 0;

  friend bool operator==(const CampaignSpec&, const CampaignSpec&) = default;
};

/// Throws ValidationError on an invalid recipe.
void validate_campaign(const CampaignSpec& spec);

/// One observation per arm, events drawn in arm order from a single generator
/// seeded with `spec.seed` (one uniform per arm). Repeated (events, trials)
/// pairs are kept and reported as warnings.
ObservationSet generate(const CampaignSpec& spec);

}  // namespace betaout
