#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "betaout/detection.hpp"
#include "betaout/posterior.hpp"
#include "betaout/synth.hpp"

namespace betaout {

/// Malformed input text. Messages carry a line number (CSV) or element index
/// (JSON).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TableFormat { Csv, Json };

TableFormat parse_table_format(const std::string& name);

/// Explicit format if given, else inferred from the extension (.json -> JSON,
/// anything else -> CSV).
TableFormat resolve_format(const std::filesystem::path& path, std::optional<TableFormat> explicit_format);

/// Header row required: label,events,trials[,prior_alpha,prior_beta] in any
/// column order. Quoted fields follow RFC 4180.
std::vector<Observation> parse_observations_csv(std::string_view text);

/// Array of {label, events, trials[, prior_alpha, prior_beta]} objects.
std::vector<Observation> parse_observations_json(std::string_view text);

std::string emit_observations_csv(std::span<const Observation> observations);
std::string emit_observations_json(std::span<const Observation> observations);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads, parses and validates an observation table.
ObservationSet ingest(const std::filesystem::path& path, TableFormat format, bool allow_duplicates = false);

CampaignSpec campaign_from_json(const nlohmann::json& doc);
nlohmann::json campaign_to_json(const CampaignSpec& spec);

/// Long-format density table: label,theta,density,is_outlier with one row per
/// observation and grid point theta = i * step < 1.
void write_plot_data(std::ostream& out, const ObservationSet& set, const DetectionOutcome& outcome, double grid_step);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace betaout
