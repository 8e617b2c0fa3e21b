#include "betaout/cli.hpp"

#include <fstream>
#include <ostream>

#include "betaout/detection.hpp"
#include "betaout/report.hpp"
#include "betaout/synth.hpp"

namespace betaout::cli {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int run_detect(const DetectFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (flags.similarity.method == OverlapMethod::Grid || flags.plot_data)
      GridOverlap::check_step(flags.similarity.grid_step);
    const ObservationSet set =
        ingest(flags.input, resolve_format(flags.input, flags.format), flags.allow_duplicates);
    const SimilarityMatrix matrix = similarity_matrix(set, flags.similarity);
    const DetectionOutcome outcome = detect(set, matrix);
    const Report report =
        build_report(set, matrix, outcome, flags.similarity, flags.allow_duplicates, flags.pooled);
    const std::string text = report_to_json(report).dump(2) + "\n";
    if (flags.out)
      write_file(*flags.out, text);
    else
      out << text;

    if (flags.plot_data) {
      std::ofstream plot(*flags.plot_data, std::ios::binary);
      if (!plot) throw std::runtime_error("cannot open '" + flags.plot_data->string() + "' for writing");
      write_plot_data(plot, set, outcome, flags.similarity.grid_step);
    }
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    return outcome.fragmented ? kExitFragmented : kExitOk;
  });
}

int run_synth(const SynthFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(flags.spec));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid campaign JSON: ") + e.what());
    }
    const ObservationSet set = generate(campaign_from_json(doc));
    const TableFormat format = flags.out ? resolve_format(*flags.out, flags.format) : flags.format.value_or(TableFormat::Csv);
    const std::string text = format == TableFormat::Csv ? emit_observations_csv(set.observations())
                                                        : emit_observations_json(set.observations());
    if (flags.out)
      write_file(*flags.out, text);
    else
      out << text;
    for (const auto& w : set.warnings()) err << "warning: " << w << '\n';
    return kExitOk;
  });
}

}  // namespace betaout::cli
