#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaout/detection.hpp"

namespace betaout {

struct ReportObservation {
  Observation observation;
  BetaParams posterior;

  friend bool operator==(const ReportObservation&, const ReportObservation&) = default;
};

/// Spread of all pairwise similarities; no threshold is applied to it.
struct Cohesion {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;

  friend bool operator==(const Cohesion&, const Cohesion&) = default;
};

inline constexpr const char* kPooledNote = "assumes kept observations are exchangeable";

struct PooledPosterior {
  BetaParams posterior;
  std::string note = kPooledNote;

  friend bool operator==(const PooledPosterior&, const PooledPosterior&) = default;
};

struct Report {
  std::string tool_version;
  std::string method;
  double grid_step = kDefaultGridStep;
  bool allow_duplicates = false;
  std::vector<ReportObservation> observations;
  std::vector<std::vector<double>> similarity;
  std::vector<std::string> kept;
  std::vector<std::string> outliers;
  bool fragmented = false;
  std::vector<IterationTrace> trace;
  Cohesion cohesion;
  std::optional<PooledPosterior> pooled;
  std::vector<std::string> warnings;

  friend bool operator==(const Report&, const Report&) = default;
};

Cohesion cohesion_of(const SimilarityMatrix& matrix);

/// Beta(sum N + 1, sum n - sum N + 1) over the kept observations.
BetaParams pooled_posterior(const std::vector<Observation>& kept);

/// `pooled` is honoured only for sets that are not fragmented.
Report build_report(const ObservationSet& set, const SimilarityMatrix& matrix, const DetectionOutcome& outcome,
                    const SimilarityOptions& options, bool allow_duplicates, bool pooled);

nlohmann::json report_to_json(const Report& report);

/// Throws ParseError on documents that do not follow the report schema.
Report report_from_json(const nlohmann::json& doc);

}  // namespace betaout
