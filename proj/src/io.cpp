#include "betaout/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace betaout {

namespace {

using nlohmann::json;

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRecord> split_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  std::size_t line = 1;
  current.line = line;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (field_started && !field.empty())
        throw ParseError("line " + std::to_string(line) + ": quote inside unquoted field");
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("line " + std::to_string(current.line) + ": unterminated quoted field");
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(what + ": expected an integer, got '" + raw + "'");
  return value;
}

double parse_real(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(what + ": expected a number, got '" + raw + "'");
  return value;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Observation-level checks shared by both formats; `where` prefixes the message.
void check_observation(const Observation& obs, const std::string& where) {
  try {
    validate_observation(obs);
  } catch (const ValidationError& e) {
    throw ValidationError(e.kind(), e.field(), where + ": " + e.what());
  }
}

std::optional<BetaParams> make_prior(std::optional<double> a, std::optional<double> b, const std::string& where) {
  if (!a && !b) return std::nullopt;
  if (!a || !b)
    throw ValidationError(ValidationError::Kind::Field, "prior",
                          where + ": prior_alpha and prior_beta must be given together");
  return BetaParams{*a, *b};
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

TableFormat resolve_format(const std::filesystem::path& path, std::optional<TableFormat> explicit_format) {
  if (explicit_format) return *explicit_format;
  return path.extension() == ".json" ? TableFormat::Json : TableFormat::Csv;
}

std::vector<Observation> parse_observations_csv(std::string_view text) {
  const auto records = split_csv(text);
  if (records.empty()) throw ParseError("line 1: missing header row");

  std::map<std::string, std::size_t> column;
  const auto& header = records.front();
  for (std::size_t c = 0; c < header.fields.size(); ++c) {
    const std::string name = trim(header.fields[c]);
    static const std::set<std::string> known = {"label", "events", "trials", "prior_alpha", "prior_beta"};
    if (!known.contains(name))
      throw ParseError("line " + std::to_string(header.line) + ": unknown column '" + name + "'");
    if (!column.emplace(name, c).second)
      throw ParseError("line " + std::to_string(header.line) + ": repeated column '" + name + "'");
  }
  for (const char* required : {"label", "events", "trials"})
    if (!column.contains(required))
      throw ParseError("line " + std::to_string(header.line) + ": header lacks required column '" + required + "'");

  std::vector<Observation> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "line " + std::to_string(rec.line);
    if (rec.fields.size() != header.fields.size())
      throw ParseError(where + ": expected " + std::to_string(header.fields.size()) + " fields, got " +
                       std::to_string(rec.fields.size()));
    auto cell = [&](const char* name) -> std::optional<std::string> {
      const auto it = column.find(name);
      if (it == column.end()) return std::nullopt;
      return rec.fields[it->second];
    };
    auto optional_real = [&](const char* name) -> std::optional<double> {
      const auto raw = cell(name);
      if (!raw || trim(*raw).empty()) return std::nullopt;
      return parse_real(*raw, where + " " + name);
    };

    Observation obs;
    obs.label = *cell("label");
    obs.events = parse_int(*cell("events"), where + " events");
    obs.trials = parse_int(*cell("trials"), where + " trials");
    obs.prior = make_prior(optional_real("prior_alpha"), optional_real("prior_beta"), where);
    check_observation(obs, where);
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<Observation> parse_observations_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("observation JSON must be an array of objects");

  std::vector<Observation> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    const std::string where = "observation[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, _] : item.items())
      if (key != "label" && key != "events" && key != "trials" && key != "prior_alpha" && key != "prior_beta")
        throw ParseError(where + ": unknown field '" + key + "'");
    auto integer = [&](const char* name) {
      if (!item.contains(name) || !item[name].is_number_integer())
        throw ParseError(where + ": field '" + name + "' must be an integer");
      return item[name].get<std::int64_t>();
    };
    auto optional_real = [&](const char* name) -> std::optional<double> {
      if (!item.contains(name) || item[name].is_null()) return std::nullopt;
      if (!item[name].is_number()) throw ParseError(where + ": field '" + name + "' must be a number");
      return item[name].get<double>();
    };
    if (!item.contains("label") || !item["label"].is_string())
      throw ParseError(where + ": field 'label' must be a string");

    Observation obs;
    obs.label = item["label"].get<std::string>();
    obs.events = integer("events");
    obs.trials = integer("trials");
    obs.prior = make_prior(optional_real("prior_alpha"), optional_real("prior_beta"), where);
    check_observation(obs, where);
    out.push_back(std::move(obs));
  }
  return out;
}

std::string emit_observations_csv(std::span<const Observation> observations) {
  const bool with_prior = std::any_of(observations.begin(), observations.end(),
                                      [](const Observation& o) { return o.prior.has_value(); });
  std::string out = with_prior ? "label,events,trials,prior_alpha,prior_beta\n" : "label,events,trials\n";
  for (const auto& o : observations) {
    out += csv_quote(o.label) + "," + std::to_string(o.events) + "," + std::to_string(o.trials);
    if (with_prior) {
      out += ",";
      if (o.prior) out += format_double(o.prior->alpha) + "," + format_double(o.prior->beta);
      else out += ",";
    }
    out += "\n";
  }
  return out;
}

std::string emit_observations_json(std::span<const Observation> observations) {
  json doc = json::array();
  for (const auto& o : observations) {
    json item = {{"label", o.label}, {"events", o.events}, {"trials", o.trials}};
    if (o.prior) {
      item["prior_alpha"] = o.prior->alpha;
      item["prior_beta"] = o.prior->beta;
    }
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ObservationSet ingest(const std::filesystem::path& path, TableFormat format, bool allow_duplicates) {
  const std::string text = read_file(path);
  auto observations = format == TableFormat::Csv ? parse_observations_csv(text) : parse_observations_json(text);
  return validate_set(std::move(observations), allow_duplicates);
}

CampaignSpec campaign_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("campaign spec must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "true_theta" && key != "arms" && key != "seed") throw ParseError("campaign: unknown field '" + key + "'");
  CampaignSpec spec;
  if (!doc.contains("true_theta") || !doc["true_theta"].is_number())
    throw ParseError("campaign: 'true_theta' must be a number");
  spec.true_theta = doc["true_theta"].get<double>();
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned())
    throw ParseError("campaign: 'seed' must be a nonnegative integer");
  spec.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("arms") || !doc["arms"].is_array()) throw ParseError("campaign: 'arms' must be an array");
  for (std::size_t i = 0; i < doc["arms"].size(); ++i) {
    const json& item = doc["arms"][i];
    const std::string where = "campaign arms[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, _] : item.items())
      if (key != "trials" && key != "bias_theta" && key != "label") throw ParseError(where + ": unknown field '" + key + "'");
    Arm arm;
    if (!item.contains("trials") || !item["trials"].is_number_integer())
      throw ParseError(where + ": 'trials' must be an integer");
    arm.trials = item["trials"].get<std::int64_t>();
    if (item.contains("bias_theta") && !item["bias_theta"].is_null()) {
      if (!item["bias_theta"].is_number()) throw ParseError(where + ": 'bias_theta' must be a number");
      arm.bias_theta = item["bias_theta"].get<double>();
    }
    if (item.contains("label")) {
      if (!item["label"].is_string()) throw ParseError(where + ": 'label' must be a string");
      arm.label = item["label"].get<std::string>();
    }
    spec.arms.push_back(std::move(arm));
  }
  validate_campaign(spec);
  return spec;
}

json campaign_to_json(const CampaignSpec& spec) {
  json arms = json::array();
  for (const auto& arm : spec.arms) {
    json item = {{"trials", arm.trials}};
    if (arm.bias_theta) item["bias_theta"] = *arm.bias_theta;
    if (arm.label) item["label"] = *arm.label;
    arms.push_back(std::move(item));
  }
  return {{"true_theta", spec.true_theta}, {"seed", spec.seed}, {"arms", std::move(arms)}};
}

void write_plot_data(std::ostream& out, const ObservationSet& set, const DetectionOutcome& outcome, double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= kMaxGridStep))
    throw std::invalid_argument("plot grid step must lie in (0, 0.01], got " + format_double(grid_step));
  std::set<std::string> flagged;
  for (const auto& o : outcome.outliers) flagged.insert(o.label);

  const auto count = static_cast<std::size_t>(std::ceil(1.0 / grid_step));
  out << "label,theta,density,is_outlier\n";
  for (std::size_t k = 0; k < set.size(); ++k) {
    const std::string label = csv_quote(set[k].label);
    const char* flag = flagged.contains(set[k].label) ? "1" : "0";
    for (std::size_t i = 0; i < count; ++i) {
      const double theta = static_cast<double>(i) * grid_step;
      if (theta >= 1.0) break;
      out << label << ',' << format_double(theta) << ',' << format_double(beta_pdf(theta, set.posteriors()[k])) << ','
          << flag << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing plot data");
}

}  // namespace betaout
