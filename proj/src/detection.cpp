#include "betaout/detection.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace betaout {

namespace {

bool by_value_then_index(const PairSimilarity& a, const PairSimilarity& b) {
  return std::tie(a.value, a.i, a.j) < std::tie(b.value, b.i, b.j);
}

Checklist select_smallest(std::vector<PairSimilarity> pairs, std::vector<std::size_t> members) {
  const std::size_t k = members.size();
  std::sort(pairs.begin(), pairs.end(), by_value_then_index);
  Checklist out;
  out.members = std::move(members);
  out.entries.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(k - 1));
  if (pairs.size() > k - 1 && pairs[k - 2].value == pairs[k - 1].value) {
    const double boundary = pairs[k - 2].value;
    for (const auto& p : pairs)
      if (p.value == boundary) out.tied_boundary.push_back(p);
  }
  return out;
}

std::string describe_ties(const ObservationSet& set, const Checklist& checklist, std::size_t round) {
  std::ostringstream os;
  os.precision(17);
  os << "round " << round << ": checklist boundary decided by tie order among pairs";
  for (const auto& p : checklist.tied_boundary)
    os << " (" << set[p.i].label << ", " << set[p.j].label << ")=" << p.value;
  return os.str();
}

}  // namespace

std::vector<PairSimilarity> similarity_list(const ObservationSet& set, const SimilarityOptions& options) {
  const std::size_t k = set.size();
  std::vector<PairSimilarity> pairs;
  pairs.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.push_back({i, j, 0.0});

  std::optional<GridOverlap> grid;
  if (options.method == OverlapMethod::Grid) grid.emplace(options.grid_step);
  const auto& post = set.posteriors();
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      auto& pr = pairs[n];
      pr.value = grid ? (*grid)(post[pr.i], post[pr.j]) : overlap_exact(post[pr.i], post[pr.j]);
    }
  };

  // Each slot is written by exactly one worker; values never depend on the split.
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(pairs.size(), 1));
  if (workers == 1) {
    evaluate(0, pairs.size());
    return pairs;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (pairs.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(pairs.size(), w * chunk);
    const std::size_t end = std::min(pairs.size(), begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        evaluate(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return pairs;
}

SimilarityMatrix similarity_matrix(const ObservationSet& set, const SimilarityOptions& options) {
  SimilarityMatrix matrix(set.size());
  for (const auto& p : similarity_list(set, options)) matrix.set(p.i, p.j, p.value);
  return matrix;
}

Checklist build_checklist(std::span<const PairSimilarity> pairs, std::size_t k) {
  if (k < 2 || pairs.size() != k * (k - 1) / 2)
    throw std::logic_error("build_checklist: expected " + std::to_string(k < 2 ? 0 : k * (k - 1) / 2) +
                           " pairs for k=" + std::to_string(k) + ", got " + std::to_string(pairs.size()));
  std::vector<std::size_t> members;
  for (const auto& p : pairs) {
    if (p.i >= p.j) throw std::logic_error("build_checklist: pair indices must satisfy i < j");
    members.push_back(p.i);
    members.push_back(p.j);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() != k)
    throw std::logic_error("build_checklist: pairs cover " + std::to_string(members.size()) + " members, expected " +
                           std::to_string(k));
  return select_smallest({pairs.begin(), pairs.end()}, std::move(members));
}

Checklist build_checklist(const SimilarityMatrix& matrix, std::span<const std::size_t> members) {
  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < 2) throw std::logic_error("build_checklist: need at least two members");
  std::vector<PairSimilarity> pairs;
  for (std::size_t a = 0; a < sorted.size(); ++a)
    for (std::size_t b = a + 1; b < sorted.size(); ++b)
      pairs.push_back({sorted[a], sorted[b], matrix(sorted[a], sorted[b])});
  return select_smallest(std::move(pairs), std::move(sorted));
}

std::size_t unsi(std::size_t member, const Checklist& checklist) {
  if (!std::binary_search(checklist.members.begin(), checklist.members.end(), member))
    throw std::logic_error("unsi: member " + std::to_string(member) + " is not under examination");
  return static_cast<std::size_t>(std::count_if(checklist.entries.begin(), checklist.entries.end(),
                                                [member](const PairSimilarity& p) { return p.i == member || p.j == member; }));
}

std::map<std::size_t, std::size_t> unsi_counts(const Checklist& checklist) {
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t m : checklist.members) counts[m] = 0;
  for (const auto& p : checklist.entries) {
    ++counts[p.i];
    ++counts[p.j];
  }
  return counts;
}

std::optional<std::size_t> find_outlier(const Checklist& checklist) {
  const std::size_t k = checklist.members.size();
  if (k < 2) throw std::logic_error("find_outlier: need at least two members");
  std::optional<std::size_t> nominated;
  std::size_t attaining = 0;
  for (const auto& [member, count] : unsi_counts(checklist)) {
    if (count != k - 1) continue;
    ++attaining;
    if (!nominated) nominated = member;
  }
  // Two members cannot both lie in k-1 >= 3 distinct pairs.
  if (k >= 4 && attaining > 1)
    throw std::logic_error("find_outlier: " + std::to_string(attaining) + " members attain unsi = k-1");
  return nominated;
}

std::optional<std::string> find_outlier(const ObservationSet& set, const SimilarityOptions& options) {
  const auto pairs = similarity_list(set, options);
  const auto nominated = find_outlier(build_checklist(pairs, set.size()));
  if (!nominated) return std::nullopt;
  return set[*nominated].label;
}

DetectionOutcome detect(const ObservationSet& set, const SimilarityOptions& options) {
  return detect(set, similarity_matrix(set, options));
}

DetectionOutcome detect(const ObservationSet& set, const SimilarityMatrix& matrix) {
  if (set.size() < kMinObservations)
    throw ValidationError(ValidationError::Kind::TooFewObservations, "observations",
                          "detect requires at least " + std::to_string(kMinObservations) + " observations");
  if (matrix.size() != set.size()) throw std::logic_error("detect: similarity matrix size mismatch");

  DetectionOutcome outcome;
  outcome.warnings = set.warnings();
  std::vector<std::size_t> members(set.size());
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;

  for (std::size_t round = 1;; ++round) {
    const Checklist checklist = build_checklist(matrix, members);
    if (!checklist.tied_boundary.empty()) outcome.warnings.push_back(describe_ties(set, checklist, round));

    IterationTrace step;
    for (std::size_t m : members) step.surviving_labels.push_back(set[m].label);
    step.checklist = checklist.entries;
    for (const auto& [member, count] : unsi_counts(checklist)) step.unsi_counts[set[member].label] = count;

    const auto nominated = find_outlier(checklist);
    if (nominated) step.removed = set[*nominated].label;
    outcome.trace.push_back(std::move(step));

    if (!nominated) {
      for (std::size_t m : members) outcome.kept.push_back(set[m]);
      return outcome;
    }
    outcome.outliers.push_back(set[*nominated]);
    members.erase(std::find(members.begin(), members.end(), *nominated));
    if (members.size() == 3) {
      // Any two distinct pairs over three members share one, so the cascade
      // would consume the rest.
      outcome.fragmented = true;
      for (std::size_t m : members) outcome.outliers.push_back(set[m]);
      return outcome;
    }
  }
}

}  // namespace betaout
