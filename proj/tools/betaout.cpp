// betaout: threshold-free outlier screening for repeated binomial samples.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "betaout/cli.hpp"
#include "betaout/version.hpp"

int main(int argc, char** argv) {
  using namespace betaout;

  CLI::App app{"Identify inconsistent sampling results among repeated binomial measurements"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  const std::map<std::string, TableFormat> formats{{"csv", TableFormat::Csv}, {"json", TableFormat::Json}};
  const std::map<std::string, OverlapMethod> methods{{"exact", OverlapMethod::Exact}, {"grid", OverlapMethod::Grid}};

  cli::DetectFlags detect;
  std::optional<TableFormat> detect_format;
  std::string plot_path;
  std::string out_path;
  auto* det = app.add_subcommand("detect", "Run outlier detection and print a JSON report");
  det->add_option("input", detect.input, "Observation table (CSV or JSON)")->required()->check(CLI::ExistingFile);
  det->add_option("--format", detect_format, "Input format (default: from extension)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->option_text("csv|json");
  det->add_option("--method", detect.similarity.method, "Overlap evaluation: exact or grid")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->option_text("exact|grid (default exact)");
  det->add_option("--grid-step", detect.similarity.grid_step, "Grid step for --method grid and plot data")
      ->default_val(kDefaultGridStep);
  det->add_option("--workers", detect.similarity.workers, "Threads for the pairwise similarity matrix")
      ->default_val(1u)
      ->check(CLI::PositiveNumber);
  det->add_flag("--allow-duplicates", detect.allow_duplicates, "Accept observations with identical posteriors");
  det->add_flag("--pooled", detect.pooled, "Add a pooled posterior over kept observations");
  det->add_option("--plot-data", plot_path, "Write long-format density table to PATH");
  det->add_option("--out", out_path, "Write the report to PATH instead of stdout");

  cli::SynthFlags synth;
  std::optional<TableFormat> synth_format;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic observation table from a campaign spec");
  syn->add_option("spec", synth.spec, "Campaign spec (JSON)")->required()->check(CLI::ExistingFile);
  syn->add_option("--format", synth_format, "Output format (default: from --out extension, else csv)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->option_text("csv|json");
  syn->add_option("--out", synth_out, "Write the table to PATH instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  if (det->parsed()) {
    detect.format = detect_format;
    if (!plot_path.empty()) detect.plot_data = plot_path;
    if (!out_path.empty()) detect.out = out_path;
    return cli::run_detect(detect, std::cout, std::cerr);
  }
  synth.format = synth_format;
  if (!synth_out.empty()) synth.out = synth_out;
  return cli::run_synth(synth, std::cout, std::cerr);
}
