#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "betaout/io.hpp"
#include "betaout/similarity.hpp"

namespace betaout::cli {

/// Process exit codes. Stable contract for scripts.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitFragmented = 3,
};

struct DetectFlags {
  std::filesystem::path input;
  std::optional<TableFormat> format;
  SimilarityOptions similarity;
  bool allow_duplicates = false;
  bool pooled = false;
  std::optional<std::filesystem::path> plot_data;
  std::optional<std::filesystem::path> out;  // stdout when absent
};

/// Ingest, detect, write the JSON report (and plot data if requested).
int run_detect(const DetectFlags& flags, std::ostream& out, std::ostream& err);

struct SynthFlags {
  std::filesystem::path spec;
  std::optional<TableFormat> format;
  std::optional<std::filesystem::path> out;
};

/// Generate an observation table from a campaign JSON file.
int run_synth(const SynthFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace betaout::cli
