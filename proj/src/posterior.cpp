#include "betaout/posterior.hpp"

#include <map>
#include <set>
#include <utility>

namespace betaout {

namespace {

std::string describe(const Observation& obs, std::size_t index) {
  return "observation " + std::to_string(index + 1) + " ('" + obs.label + "')";
}

}  // namespace

void validate_observation(const Observation& obs) {
  if (obs.label.empty()) throw ValidationError(ValidationError::Kind::Field, "label", "label must be nonempty");
  if (obs.trials < 1)
    throw ValidationError(ValidationError::Kind::Field, "trials",
                          "'" + obs.label + "': trials must be >= 1, got " + std::to_string(obs.trials));
  if (obs.events < 0)
    throw ValidationError(ValidationError::Kind::Field, "events",
                          "'" + obs.label + "': events must be >= 0, got " + std::to_string(obs.events));
  if (obs.events > obs.trials)
    throw ValidationError(ValidationError::Kind::Field, "events",
                          "'" + obs.label + "': events exceed trials (n < N): " + std::to_string(obs.events) +
                              " > " + std::to_string(obs.trials));
  if (obs.prior) {
    try {
      obs.prior->validate();
    } catch (const DomainError& e) {
      throw ValidationError(ValidationError::Kind::Field, "prior", "'" + obs.label + "': invalid prior: " + e.what());
    }
  }
}

BetaParams posterior_of(const Observation& obs) {
  validate_observation(obs);
  const BetaParams prior = obs.prior.value_or(BetaParams{1.0, 1.0});
  return BetaParams{static_cast<double>(obs.events) + prior.alpha,
                    static_cast<double>(obs.trials - obs.events) + prior.beta};
}

std::optional<std::size_t> ObservationSet::find(const std::string& label) const {
  for (std::size_t i = 0; i < observations_.size(); ++i)
    if (observations_[i].label == label) return i;
  return std::nullopt;
}

ObservationSet validate_set(std::vector<Observation> observations, bool allow_duplicates) {
  ObservationSet set;
  std::set<std::string> labels;
  std::map<std::pair<double, double>, std::vector<std::size_t>> by_posterior;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Observation& obs = observations[i];
    try {
      validate_observation(obs);
    } catch (const ValidationError& e) {
      throw ValidationError(e.kind(), e.field(), describe(obs, i) + ": " + e.what());
    }
    if (!labels.insert(obs.label).second)
      throw ValidationError(ValidationError::Kind::Field, "label", "duplicate label '" + obs.label + "'");
    const BetaParams post = posterior_of(obs);
    set.posteriors_.push_back(post);
    by_posterior[{post.alpha, post.beta}].push_back(i);
  }
  if (observations.size() < kMinObservations)
    throw ValidationError(ValidationError::Kind::TooFewObservations, "observations",
                          "at least " + std::to_string(kMinObservations) + " observations are required, got " +
                              std::to_string(observations.size()));

  for (const auto& [params, members] : by_posterior) {
    if (members.size() < 2) continue;
    std::string names;
    for (std::size_t m : members) {
      if (!names.empty()) names += ", ";
      names += describe(observations[m], m);
    }
    const std::string message = "identical posteriors Beta(" + std::to_string(params.first) + ", " +
                                std::to_string(params.second) + ") for " + names;
    if (!allow_duplicates)
      throw ValidationError(ValidationError::Kind::DuplicatePosterior, "posterior", message);
    set.warnings_.push_back(message);
  }
  set.observations_ = std::move(observations);
  return set;
}

}  // namespace betaout
