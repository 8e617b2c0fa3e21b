#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betaout/posterior.hpp"
#include "betaout/similarity.hpp"

namespace betaout {

/// Symmetric k x k matrix of pairwise overlaps; the diagonal is 1.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t k) : k_(k), values_(k * k, 1.0) {}

  std::size_t size() const noexcept { return k_; }
  double operator()(std::size_t i, std::size_t j) const { return values_.at(i * k_ + j); }
  void set(std::size_t i, std::size_t j, double v) {
    values_.at(i * k_ + j) = v;
    values_.at(j * k_ + i) = v;
  }

 private:
  std::size_t k_ = 0;
  std::vector<double> values_;
};

/// All k(k-1)/2 pair overlaps of the set, lexicographic in (i, j).
std::vector<PairSimilarity> similarity_list(const ObservationSet& set, const SimilarityOptions& options);

SimilarityMatrix similarity_matrix(const ObservationSet& set, const SimilarityOptions& options);

/// The k-1 least similar pairs among `members` (indices into the original
/// set), ordered by value then (i, j).
struct Checklist {
  std::vector<std::size_t> members;
  std::vector<PairSimilarity> entries;
  /// Pairs whose value equals the largest selected value but fell outside the
  /// checklist, plus the selected pairs sharing that value. Empty when the
  /// boundary is not tied.
  std::vector<PairSimilarity> tied_boundary;
};

/// `pairs` must hold exactly k(k-1)/2 entries.
Checklist build_checklist(std::span<const PairSimilarity> pairs, std::size_t k);

/// Checklist over a subset, reading values from a cached matrix.
Checklist build_checklist(const SimilarityMatrix& matrix, std::span<const std::size_t> members);

/// Number of checklist pairs that contain `member`.
std::size_t unsi(std::size_t member, const Checklist& checklist);

/// Counts for every member, keyed by member index.
std::map<std::size_t, std::size_t> unsi_counts(const Checklist& checklist);

/// Member present in every checklist pair, if any. With two members the
/// single pair nominates its lower index.
std::optional<std::size_t> find_outlier(const Checklist& checklist);

std::optional<std::string> find_outlier(const ObservationSet& set, const SimilarityOptions& options);

struct IterationTrace {
  std::vector<std::string> surviving_labels;
  std::vector<PairSimilarity> checklist;  // indices refer to the input set
  std::map<std::string, std::size_t> unsi_counts;
  std::optional<std::string> removed;

  friend bool operator==(const IterationTrace&, const IterationTrace&) = default;
};

struct DetectionOutcome {
  std::vector<Observation> kept;
  std::vector<Observation> outliers;  // removal order; on fragmentation the
                                      // last three survivors follow in input order
  bool fragmented = false;
  std::vector<IterationTrace> trace;
  std::vector<std::string> warnings;
};

/// Iterated outlier removal. Stops when nobody is nominated, or when three
/// observations remain, in which case the whole set is fragmented.
DetectionOutcome detect(const ObservationSet& set, const SimilarityOptions& options);

DetectionOutcome detect(const ObservationSet& set, const SimilarityMatrix& matrix);

}  // namespace betaout
