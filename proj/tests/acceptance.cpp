// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance N [M ...]  run only the listed criteria

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "betaout/cli.hpp"
#include "betaout/detection.hpp"
#include "betaout/io.hpp"
#include "betaout/report.hpp"
#include "betaout/synth.hpp"
#include "generators.hpp"

using namespace betaout;
using betaout::testing::Gen;
using betaout::testing::rel_err;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (++failures_ <= 3) notes_.push_back(what);
  }
  Result result(const std::string& summary) const {
    std::string detail = summary;
    for (const auto& n : notes_) detail += "; " + n;
    if (failures_ > 3) detail += "; +" + std::to_string(failures_ - 3) + " more";
    return {pass_, detail};
  }

 private:
  bool pass_ = true;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

fs::path fixture(const std::string& name) { return fs::path(BETAOUT_FIXTURE_DIR) / name; }
fs::path data(const std::string& name) { return fs::path(BETAOUT_DATA_DIR) / name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "betaout_acceptance";
  fs::create_directories(dir);
  return dir / name;
}

SimilarityOptions grid_001() {
  SimilarityOptions o;
  o.method = OverlapMethod::Grid;
  o.grid_step = 0.001;
  return o;
}

std::vector<std::string> labels(const std::vector<Observation>& v) {
  std::vector<std::string> out;
  for (const auto& o : v) out.push_back(o.label);
  return out;
}

// Runs fn(i) for i in [0, n) over all cores.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

Result special_functions() {
  Tally t;
  Gen g(101);
  double worst_rec = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double x = g.uniform(0.5, 1e5);
    worst_rec = std::max(worst_rec, rel_err(log_gamma(x + 1.0), log_gamma(x) + std::log(x)));
  }
  t.expect(worst_rec < 1e-11, "recurrence worst " + num(worst_rec));
  double worst_refl = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const BetaParams p = g.shapes(0.5, 1e4);
    const double x = g.uniform(0.0, 1.0);
    worst_refl = std::max(worst_refl, std::abs(beta_cdf(x, p) + beta_cdf(1.0 - x, {p.beta, p.alpha}) - 1.0));
  }
  t.expect(worst_refl < 1e-9, "reflection worst " + num(worst_refl));
  return t.result("log_gamma recurrence worst rel " + num(worst_rec) + ", beta_cdf reflection worst " + num(worst_refl));
}

Result overlap() {
  Tally t;
  Gen g(102);
  std::vector<std::pair<BetaParams, BetaParams>> pairs;
  for (int n = 0; n < 1000; ++n) {
    const BetaParams p{g.uniform(1.0, 2000.0), g.uniform(1.0, 2000.0)};
    const BetaParams q{g.uniform(1.0, 2000.0), g.uniform(1.0, 2000.0)};
    pairs.emplace_back(p, q);
  }
  const GridOverlap fine(1e-6);
  std::vector<double> diff(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t n) {
    diff[n] = std::abs(overlap_exact(pairs[n].first, pairs[n].second) - fine(pairs[n].first, pairs[n].second));
  });
  const double worst = *std::max_element(diff.begin(), diff.end());
  std::size_t overlapping = 0;
  for (const auto& [p, q] : pairs) overlapping += overlap_exact(p, q) > 1e-3;
  t.expect(worst <= 1e-5, "exact vs grid worst " + num(worst));
  for (const auto& [p, q] : pairs) {
    t.expect(overlap_exact(p, q) == overlap_exact(q, p), "asymmetric pair");
    t.expect(std::abs(overlap_exact(p, p) - 1.0) <= 1e-9, "self overlap off");
  }
  const double mirror = overlap_exact({101, 1}, {1, 101});
  const double want = 2.0 * std::pow(0.5, 101);
  t.expect(rel_err(mirror, want) <= 1e-6, "mirror pair rel " + num(rel_err(mirror, want)));
  return t.result("1000 pairs (" + std::to_string(overlapping) + " with overlap > 1e-3), worst |exact - grid(1e-6)| " +
                  num(worst) + ", mirror pair rel err " +
                  num(rel_err(mirror, want)));
}

Result oracle_equivalence() {
  Tally t;
  const json ref = load_json(fixture("reference_sets.json"));
  std::vector<json> records{ref["named"]["five_surveys"]};
  for (const auto& r : ref["random"]) records.push_back(r);
  std::size_t agree = 0;
  for (const auto& rec : records) {
    const auto set = validate_set(testing::from_counts(rec["N"].get<std::vector<std::int64_t>>(),
                                                       rec["n"].get<std::vector<std::int64_t>>()));
    const auto out = detect(set, grid_001());
    std::vector<std::string> want;
    for (const auto& i : rec["outliers"]) want.push_back("o" + std::to_string(i.get<int>()));
    const auto got = labels(out.outliers);
    bool same = out.fragmented == rec["fragmented"].get<bool>();
    if (same && out.fragmented) {
      // Both stop being informative at three survivors: compare the removals
      // that led there.
      const auto decided = static_cast<std::ptrdiff_t>(set.size() - 3);
      same = got.size() == want.size() && std::equal(got.begin(), got.begin() + decided, want.begin());
    } else if (same) {
      same = got == want;
    }
    agree += same;
    t.expect(same, "mismatch on N=" + rec["N"].dump());
  }
  t.expect(records.size() >= 101, "fewer than 100 random sets");
  return t.result(std::to_string(agree) + "/" + std::to_string(records.size()) +
                  " sets agree (five-survey example included)");
}

Result structure() {
  Tally t;
  Gen g(104);
  std::size_t fragmented = 0;
  std::size_t rounds = 0;
  for (int n = 0; n < 500; ++n) {
    const auto set = validate_set(g.observations(static_cast<std::size_t>(g.integer(4, 12)), 10, 500));
    const auto out = detect(set, n % 2 ? grid_001() : SimilarityOptions{});
    const std::size_t k = set.size();
    t.expect(out.kept.size() + out.outliers.size() == k, "conservation");
    std::size_t removals = 0;
    for (const auto& step : out.trace) {
      const std::size_t current = step.surviving_labels.size();
      std::size_t at_max = 0;
      for (const auto& [label, count] : step.unsi_counts) at_max += count == current - 1;
      t.expect(current < 4 || at_max <= 1, "two labels attain k-1");
      removals += step.removed.has_value();
      ++rounds;
    }
    t.expect(out.fragmented == (removals == k - 3), "fragmented without exactly k-3 removals");
    fragmented += out.fragmented;
  }
  std::size_t nominated = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto set = validate_set(g.observations(static_cast<std::size_t>(g.integer(4, 8)), 10, 500));
    const auto matrix = similarity_matrix(set, {});
    std::vector<std::size_t> all(set.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), g.engine());
    std::vector<std::size_t> three(all.begin(), all.begin() + 3);
    const bool ok = find_outlier(build_checklist(matrix, three)).has_value();
    nominated += ok;
    t.expect(ok, "3-subset without nomination");
  }
  return t.result("500 sets / " + std::to_string(rounds) + " rounds (" + std::to_string(fragmented) +
                  " fragmented), 3-element lemma " + std::to_string(nominated) + "/1000");
}

Result detection_power() {
  Tally t;
  const json ref = load_json(fixture("detection_power.json"));
  std::string summary;
  for (const char* scenario : {"biased", "concordant"}) {
    const json& block = ref[scenario];
    CampaignSpec spec;
    spec.true_theta = ref["true_theta"].get<double>();
    for (const auto& a : block["arms"])
      spec.arms.push_back({a[0].get<std::int64_t>(),
                           a[1].is_null() ? std::nullopt : std::optional<double>(a[1].get<double>()), std::nullopt});
    int hits_grid = 0;
    int hits_exact = 0;
    for (const auto& run : block["runs"]) {
      spec.seed = run["seed"].get<std::uint64_t>();
      const auto set = generate(spec);
      for (std::size_t i = 0; i < set.size(); ++i)
        t.expect(set[i].events == run["events"][i].get<std::int64_t>(), "synthetic draw differs from fixture");
      auto verdict = [&](const DetectionOutcome& out) {
        if (out.fragmented) return false;
        if (std::string(scenario) == "biased") return labels(out.outliers) == std::vector<std::string>{"arm5"};
        return out.outliers.empty();
      };
      const bool grid_ok = verdict(detect(set, grid_001()));
      t.expect(grid_ok == run["pass"].get<bool>(), "seed " + run["seed"].dump() + " verdict differs from reference");
      hits_grid += grid_ok;
      hits_exact += verdict(detect(set, SimilarityOptions{}));
    }
    t.expect(hits_grid == block["rate"].get<int>(), std::string(scenario) + " rate differs from recorded fixture");
    const int need = std::string(scenario) == "biased" ? 99 : 95;
    t.expect(hits_grid >= need && hits_exact >= need,
             std::string(scenario) + " rate " + std::to_string(hits_grid) + "/100 below " + std::to_string(need));
    summary += std::string(summary.empty() ? "" : ", ") + scenario + " " + std::to_string(hits_grid) + "/100 grid " +
               std::to_string(hits_exact) + "/100 exact (need " + std::to_string(need) + ")";
  }
  return t.result(summary);
}

std::string shell_quote(const fs::path& p) { return "'" + p.string() + "'"; }

int run_cli(const std::string& args) {
  const std::string cmd = shell_quote(BETAOUT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Result plot_data() {
  Tally t;
  const auto report_path = scratch("fig_report.json");
  const auto plot_path = scratch("fig_plot.csv");
  const int code = run_cli("detect " + shell_quote(data("five_surveys.csv")) + " --method grid --out " +
                           shell_quote(report_path) + " --plot-data " + shell_quote(plot_path));
  t.expect(code == 0, "exit " + std::to_string(code));
  if (code != 0) return t.result("cli failed");
  const Report report = report_from_json(load_json(report_path));
  const std::set<std::string> outliers(report.outliers.begin(), report.outliers.end());
  std::istringstream in(read_file(plot_path));
  std::string line;
  std::getline(in, line);
  t.expect(line == "label,theta,density,is_outlier", "header");
  std::map<std::string, std::size_t> rows;
  std::map<std::string, std::set<std::string>> flags;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) {
      t.expect(false, "malformed row");
      continue;
    }
    ++rows[f[0]];
    flags[f[0]].insert(f[3]);
  }
  t.expect(rows.size() == 5, std::to_string(rows.size()) + " curves");
  std::size_t flagged = 0;
  for (const auto& [label, count] : rows) {
    t.expect(count == 1000, label + " has " + std::to_string(count) + " points");
    t.expect(flags[label].size() == 1, label + " has mixed flags");
    const bool is_out = flags[label].count("1") > 0;
    flagged += is_out;
    t.expect(is_out == outliers.contains(label), label + " flag disagrees with report");
  }
  t.expect(flagged == report.outliers.size(), "flagged curve count");
  return t.result(std::to_string(rows.size()) + " curves x " + std::to_string(rows.empty() ? 0 : rows.begin()->second) +
                  " points, " + std::to_string(flagged) + " flagged, report lists " +
                  std::to_string(report.outliers.size()) + " outliers");
}

Result cli_contract() {
  Tally t;
  Gen g(107);
  int roundtrips = 0;
  for (int n = 0; n < 200; ++n) {
    std::vector<Observation> table;
    const auto k = g.integer(4, 10);
    for (std::int64_t i = 0; i < k; ++i) {
      Observation o;
      o.label = "s" + std::to_string(i) + (g.coin() ? ",\"x\"" : "");
      o.trials = g.integer(1, 5000);
      o.events = g.integer(0, o.trials);
      if (g.coin(0.3)) o.prior = BetaParams{g.log_uniform(0.1, 10), g.log_uniform(0.1, 10)};
      table.push_back(o);
    }
    for (const char* ext : {"csv", "json"}) {
      const auto path = scratch(std::string("rt.") + ext);
      const TableFormat f = resolve_format(path, std::nullopt);
      write_file(path, f == TableFormat::Csv ? emit_observations_csv(table) : emit_observations_json(table));
      const bool same = ingest(path, f, true).observations() == table;
      t.expect(same, std::string(ext) + " round trip differs");
      roundtrips += same;
    }
  }
  // A synthesised table goes through the binary and comes back intact.
  const auto synth_csv = scratch("synth.csv");
  const auto synth_json = scratch("synth.json");
  t.expect(run_cli("synth " + shell_quote(data("campaign.json")) + " --out " + shell_quote(synth_csv)) == 0, "synth csv");
  t.expect(run_cli("synth " + shell_quote(data("campaign.json")) + " --out " + shell_quote(synth_json)) == 0, "synth json");
  t.expect(ingest(synth_csv, TableFormat::Csv, true).observations() == ingest(synth_json, TableFormat::Json, true).observations(),
           "csv and json synth output differ");

  struct Scenario {
    const char* file;
    int code;
    const char* outliers;
  };
  const std::vector<Scenario> golden{{"five_surveys.csv", 0, ""}, {"invalid.csv", 2, nullptr}, {"planted_bias.csv", 3, "biased,w,x,y"}};
  std::string codes;
  for (const auto& s : golden) {
    const auto out = scratch(std::string(s.file) + ".report.json");
    fs::remove(out);
    const int code = run_cli("detect " + shell_quote(data(s.file)) + " --out " + shell_quote(out));
    codes += std::string(codes.empty() ? "" : ", ") + s.file + " -> " + std::to_string(code);
    t.expect(code == s.code, std::string(s.file) + " exit " + std::to_string(code));
    if (!s.outliers) {
      t.expect(!fs::exists(out), "report written on validation failure");
      continue;
    }
    if (!fs::exists(out)) continue;
    std::string joined;
    for (const auto& l : report_from_json(load_json(out)).outliers) joined += (joined.empty() ? "" : ",") + l;
    t.expect(joined == s.outliers, std::string(s.file) + " outliers " + joined);
  }
  return t.result(std::to_string(roundtrips) + "/400 round trips; " + codes);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Result (*)()>> criteria{
      {"special-function accuracy", special_functions}, {"overlap correctness", overlap},
      {"reference-oracle equivalence", oracle_equivalence}, {"structural invariants", structure},
      {"detection power", detection_power}, {"plot-data reproduction", plot_data},
      {"CLI contract", cli_contract}};
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  bool all_pass = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    Result r;
    try {
      r = criteria[c].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && r.pass;
    std::cout << "criterion " << id << " [" << (r.pass ? "PASS" : "FAIL") << "] " << criteria[c].first << ": "
              << r.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
