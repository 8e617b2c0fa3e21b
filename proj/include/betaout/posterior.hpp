#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "betaout/special_functions.hpp"

namespace betaout {

/// Invalid input data. `field()` names the offending field or condition.
class ValidationError : public std::invalid_argument {
 public:
  enum class Kind { Field, DuplicatePosterior, TooFewObservations };

  ValidationError(Kind kind, std::string field, const std::string& message)
      : std::invalid_argument(message), kind_(kind), field_(std::move(field)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Kind kind_;
  std::string field_;
};

/// One sampling result: `events` successes out of `trials`.
struct Observation {
  std::string label;
  std::int64_t events = 0;
  std::int64_t trials = 1;
  std::optional<BetaParams> prior;  // uniform Beta(1, 1) when absent

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr std::size_t kMinObservations = 4;

/// Throws ValidationError naming the offending field.
void validate_observation(const Observation& obs);

/// Conjugate update: Beta(events + a0, trials - events + b0).
BetaParams posterior_of(const Observation& obs);

/// An ordered, validated collection of observations. Immutable once built.
class ObservationSet {
 public:
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  const std::vector<BetaParams>& posteriors() const noexcept { return posteriors_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::size_t size() const noexcept { return observations_.size(); }
  const Observation& operator[](std::size_t i) const { return observations_.at(i); }

  /// Index of `label`, or nullopt.
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  friend ObservationSet validate_set(std::vector<Observation>, bool);
  std::vector<Observation> observations_;
  std::vector<BetaParams> posteriors_;
  std::vector<std::string> warnings_;
};

/// Checks k >= 4, per-observation invariants, label uniqueness and (unless
/// `allow_duplicates`) distinct posteriors. Duplicates that are allowed are
/// kept and reported through `warnings()`.
ObservationSet validate_set(std::vector<Observation> observations, bool allow_duplicates = false);

}  // namespace betaout
