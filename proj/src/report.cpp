#include "betaout/report.hpp"

#include <algorithm>

#include "betaout/io.hpp"
#include "betaout/version.hpp"

namespace betaout {

using nlohmann::json;

namespace {

std::vector<std::string> labels_of(const std::vector<Observation>& obs) {
  std::vector<std::string> out;
  for (const auto& o : obs) out.push_back(o.label);
  return out;
}

template <typename T>
T field(const json& doc, const char* name) {
  if (!doc.contains(name)) throw ParseError(std::string("report: missing field '") + name + "'");
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: field '") + name + "': " + e.what());
  }
}

json params_json(const BetaParams& p) { return {{"alpha", p.alpha}, {"beta", p.beta}}; }

BetaParams params_from(const json& doc) { return {field<double>(doc, "alpha"), field<double>(doc, "beta")}; }

}  // namespace

Cohesion cohesion_of(const SimilarityMatrix& matrix) {
  std::vector<double> values;
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t j = i + 1; j < matrix.size(); ++j) values.push_back(matrix(i, j));
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return {values.front(), median, values.back()};
}

BetaParams pooled_posterior(const std::vector<Observation>& kept) {
  std::int64_t events = 0;
  std::int64_t trials = 0;
  for (const auto& o : kept) {
    events += o.events;
    trials += o.trials;
  }
  return {static_cast<double>(events) + 1.0, static_cast<double>(trials - events) + 1.0};
}

Report build_report(const ObservationSet& set, const SimilarityMatrix& matrix, const DetectionOutcome& outcome,
                    const SimilarityOptions& options, bool allow_duplicates, bool pooled) {
  Report r;
  r.tool_version = kToolVersion;
  r.method = to_string(options.method);
  r.grid_step = options.grid_step;
  r.allow_duplicates = allow_duplicates;
  for (std::size_t i = 0; i < set.size(); ++i) r.observations.push_back({set[i], set.posteriors()[i]});
  r.similarity.assign(set.size(), std::vector<double>(set.size(), 1.0));
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j) r.similarity[i][j] = matrix(i, j);
  r.kept = labels_of(outcome.kept);
  r.outliers = labels_of(outcome.outliers);
  r.fragmented = outcome.fragmented;
  r.trace = outcome.trace;
  r.cohesion = cohesion_of(matrix);
  if (pooled && !outcome.fragmented) r.pooled = PooledPosterior{pooled_posterior(outcome.kept), kPooledNote};
  r.warnings = outcome.warnings;
  return r;
}

json report_to_json(const Report& r) {
  json observations = json::array();
  for (const auto& ro : r.observations) {
    json item = {{"label", ro.observation.label},
                 {"events", ro.observation.events},
                 {"trials", ro.observation.trials},
                 {"posterior", params_json(ro.posterior)}};
    if (ro.observation.prior) item["prior"] = params_json(*ro.observation.prior);
    observations.push_back(std::move(item));
  }

  json trace = json::array();
  for (const auto& step : r.trace) {
    json checklist = json::array();
    for (const auto& p : step.checklist) checklist.push_back({{"i", p.i}, {"j", p.j}, {"value", p.value}});
    trace.push_back({{"surviving", step.surviving_labels},
                     {"checklist", std::move(checklist)},
                     {"unsi", step.unsi_counts},
                     {"removed", step.removed ? json(*step.removed) : json(nullptr)}});
  }

  json doc = {
      {"tool_version", r.tool_version},
      {"method", r.method},
      {"grid_step", r.grid_step},
      {"allow_duplicates", r.allow_duplicates},
      {"observations", std::move(observations)},
      {"similarity", r.similarity},
      {"outcome",
       {{"kept", r.kept}, {"outliers", r.outliers}, {"fragmented", r.fragmented}, {"trace", std::move(trace)}}},
      {"cohesion", {{"min", r.cohesion.min}, {"median", r.cohesion.median}, {"max", r.cohesion.max}}},
      {"warnings", r.warnings},
  };
  if (r.pooled) doc["pooled"] = {{"posterior", params_json(r.pooled->posterior)}, {"note", r.pooled->note}};
  return doc;
}

Report report_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("report: expected a JSON object");
  Report r;
  r.tool_version = field<std::string>(doc, "tool_version");
  r.method = field<std::string>(doc, "method");
  r.grid_step = field<double>(doc, "grid_step");
  r.allow_duplicates = field<bool>(doc, "allow_duplicates");
  for (const auto& item : field<json>(doc, "observations")) {
    ReportObservation ro;
    ro.observation.label = field<std::string>(item, "label");
    ro.observation.events = field<std::int64_t>(item, "events");
    ro.observation.trials = field<std::int64_t>(item, "trials");
    if (item.contains("prior")) ro.observation.prior = params_from(item.at("prior"));
    ro.posterior = params_from(field<json>(item, "posterior"));
    r.observations.push_back(std::move(ro));
  }
  r.similarity = field<std::vector<std::vector<double>>>(doc, "similarity");
  const json outcome = field<json>(doc, "outcome");
  r.kept = field<std::vector<std::string>>(outcome, "kept");
  r.outliers = field<std::vector<std::string>>(outcome, "outliers");
  r.fragmented = field<bool>(outcome, "fragmented");
  for (const auto& item : field<json>(outcome, "trace")) {
    IterationTrace step;
    step.surviving_labels = field<std::vector<std::string>>(item, "surviving");
    for (const auto& p : field<json>(item, "checklist"))
      step.checklist.push_back({field<std::size_t>(p, "i"), field<std::size_t>(p, "j"), field<double>(p, "value")});
    step.unsi_counts = field<std::map<std::string, std::size_t>>(item, "unsi");
    const json removed = field<json>(item, "removed");
    if (!removed.is_null()) step.removed = removed.get<std::string>();
    r.trace.push_back(std::move(step));
  }
  const json cohesion = field<json>(doc, "cohesion");
  r.cohesion = {field<double>(cohesion, "min"), field<double>(cohesion, "median"), field<double>(cohesion, "max")};
  if (doc.contains("pooled")) {
    const json pooled = doc.at("pooled");
    r.pooled = PooledPosterior{params_from(field<json>(pooled, "posterior")), field<std::string>(pooled, "note")};
  }
  r.warnings = field<std::vector<std::string>>(doc, "warnings");
  return r;
}

}  // namespace betaout
