#include "betaout/synth.hpp"

#include <cmath>
#include <set>

namespace betaout {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::int64_t binomial_inverse_cdf(std::int64_t trials, double p, double u) {
  if (trials < 1) throw DomainError("binomial_inverse_cdf: trials must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("binomial_inverse_cdf: p must lie in (0,1)");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("binomial_inverse_cdf: u must lie in [0,1)");
  auto cdf = [&](std::int64_t x) {
    if (x >= trials) return 1.0;
    return beta_cdf(1.0 - p, BetaParams{static_cast<double>(trials - x), static_cast<double>(x + 1)});
  };
  std::int64_t lo = 0;
  std::int64_t hi = trials;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (cdf(mid) >= u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

void validate_campaign(const CampaignSpec& spec) {
  using K = ValidationError::Kind;
  if (!(spec.true_theta > 0.0 && spec.true_theta < 1.0))
    throw ValidationError(K::Field, "true_theta", "true_theta must lie in (0,1)");
  if (spec.arms.size() < kMinObservations)
    throw ValidationError(K::TooFewObservations, "arms",
                          "a campaign needs at least " + std::to_string(kMinObservations) + " arms, got " +
                              std::to_string(spec.arms.size()));
  std::set<std::string> labels;
  for (std::size_t i = 0; i < spec.arms.size(); ++i) {
    const Arm& arm = spec.arms[i];
    const std::string where = "arm " + std::to_string(i + 1);
    if (arm.trials < 1) throw ValidationError(K::Field, "trials", where + ": trials must be >= 1");
    if (arm.bias_theta && !(*arm.bias_theta > 0.0 && *arm.bias_theta < 1.0))
      throw ValidationError(K::Field, "bias_theta", where + ": bias_theta must lie in (0,1)");
    if (arm.label && arm.label->empty()) throw ValidationError(K::Field, "label", where + ": label must be nonempty");
    const std::string label = arm.label.value_or("arm" + std::to_string(i + 1));
    if (!labels.insert(label).second) throw ValidationError(K::Field, "label", where + ": duplicate label " + label);
  }
}

ObservationSet generate(const CampaignSpec& spec) {
  validate_campaign(spec);
  SplitMix64 rng(spec.seed);
  std::vector<Observation> observations;
  for (std::size_t i = 0; i < spec.arms.size(); ++i) {
    const Arm& arm = spec.arms[i];
    const double theta = arm.bias_theta.value_or(spec.true_theta);
    Observation obs;
    obs.label = arm.label.value_or("arm" + std::to_string(i + 1));
    obs.trials = arm.trials;
    obs.events = binomial_inverse_cdf(arm.trials, theta, rng.uniform01());
    observations.push_back(std::move(obs));
  }
  return validate_set(std::move(observations), /*allow_duplicates=*/true);
}

}  // namespace betaout
