#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "betaout/special_functions.hpp"

namespace betaout {

/// Overlap of two posteriors for the unordered pair (i, j), i < j.
struct PairSimilarity {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  friend bool operator==(const PairSimilarity&, const PairSimilarity&) = default;
};

enum class OverlapMethod { Exact, Grid };

std::string to_string(OverlapMethod method);
OverlapMethod parse_overlap_method(const std::string& name);

inline constexpr double kDefaultGridStep = 0.001;
inline constexpr double kMaxGridStep = 0.01;

struct SimilarityOptions {
  OverlapMethod method = OverlapMethod::Exact;
  double grid_step = kDefaultGridStep;
  unsigned workers = 1;  // threads used for the pairwise matrix
};

/// Raised by crossing_points for two identical parameter sets.
class DegeneratePair : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Points in (0, 1) where the two densities cross (sign change of the log
/// ratio), ascending. At most two exist.
std::vector<double> crossing_points(const BetaParams& p, const BetaParams& q);

/// Integral of min(p, q) over [0, 1], assembled from incomplete-beta
/// increments between crossing points.
double overlap_exact(const BetaParams& p, const BetaParams& q);

/// Left Riemann sum of min(p, q) on {0, step, 2 step, ...} below 1. Endpoint
/// densities take their one-sided limits. Clamped to [0, 1].
double overlap_grid(const BetaParams& p, const BetaParams& q, double step);

double overlap(const BetaParams& p, const BetaParams& q, const SimilarityOptions& options);

/// Precomputed log-abscissae for repeated grid overlaps at one step size.
class GridOverlap {
 public:
  explicit GridOverlap(double step);
  /// Throws std::invalid_argument unless 0 < step <= 0.01.
  static void check_step(double step);
  double operator()(const BetaParams& p, const BetaParams& q) const;
  double step() const noexcept { return step_; }
  std::size_t points() const noexcept { return log_theta_.size(); }

 private:
  double step_;
  std::vector<double> log_theta_;
  std::vector<double> log_one_minus_;
};

}  // namespace betaout
