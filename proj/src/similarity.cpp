#include "betaout/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace betaout {

namespace {

// d(theta) = ln p(theta) - ln q(theta), written so that every term is exact
// in the shape differences.
struct LogRatio {
  double da;
  double db;
  double offset;  // ln B(q) - ln B(p)

  LogRatio(const BetaParams& p, const BetaParams& q)
      : da(p.alpha - q.alpha),
        db(p.beta - q.beta),
        offset(log_beta_function(q.alpha, q.beta) - log_beta_function(p.alpha, p.beta)) {}

  double operator()(double theta) const {
    double value = offset;
    if (da != 0.0) value += da * std::log(theta);
    if (db != 0.0) value += db * std::log1p(-theta);
    return value;
  }

  int sign_at_zero() const {
    if (da != 0.0) return da > 0.0 ? -1 : 1;
    return offset > 0.0 ? 1 : (offset < 0.0 ? -1 : 0);
  }

  int sign_at_one() const {
    if (db != 0.0) return db > 0.0 ? -1 : 1;
    return offset > 0.0 ? 1 : (offset < 0.0 ? -1 : 0);
  }
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Bisects to the last representable bracket. `lo_sign` is the sign of d
// just above `lo`.
double bisect(const LogRatio& d, double lo, double hi, int lo_sign) {
  for (int iter = 0; iter < 2200; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const int s = sign_of(d(mid));
    if (s == 0) return mid;
    if (s == lo_sign)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

// Mass of `params` on [u, v] without subtracting two numbers close to one.
double mass_between(const BetaParams& params, double u, double v) {
  if (u == 0.0 && v == 1.0) return 1.0;
  if (u == 0.0) return beta_cdf(v, params);
  if (v == 1.0) return beta_sf(u, params);
  const BetaTails tu = beta_tails(u, params);
  const BetaTails tv = beta_tails(v, params);
  const double mass = tv.lower < 0.5 ? tv.lower - tu.lower : tu.upper - tv.upper;
  return std::max(0.0, mass);
}

bool canonical_less(const BetaParams& a, const BetaParams& b) {
  return std::tie(a.alpha, a.beta) < std::tie(b.alpha, b.beta);
}

}  // namespace

std::string to_string(OverlapMethod method) { return method == OverlapMethod::Exact ? "exact" : "grid"; }

OverlapMethod parse_overlap_method(const std::string& name) {
  if (name == "exact") return OverlapMethod::Exact;
  if (name == "grid") return OverlapMethod::Grid;
  throw std::invalid_argument("unknown overlap method '" + name + "' (expected exact or grid)");
}

std::vector<double> crossing_points(const BetaParams& p, const BetaParams& q) {
  p.validate();
  q.validate();
  if (p == q) throw DegeneratePair("crossing_points: identical parameters have no isolated crossings");

  const LogRatio d(p, q);
  const int s0 = d.sign_at_zero();
  const int s1 = d.sign_at_one();

  // d'(t) = da/t - db/(1-t) vanishes at most once, at da / (da + db).
  std::vector<double> roots;
  if (d.da != 0.0 && d.db != 0.0 && (d.da > 0.0) == (d.db > 0.0)) {
    const double stationary = d.da / (d.da + d.db);
    const int sm = sign_of(d(stationary));
    if (sm != 0) {
      if (s0 != 0 && s0 != sm) roots.push_back(bisect(d, 0.0, stationary, s0));
      if (s1 != 0 && s1 != sm) roots.push_back(bisect(d, stationary, 1.0, sm));
    }
  } else if (s0 != 0 && s1 != 0 && s0 != s1) {
    roots.push_back(bisect(d, 0.0, 1.0, s0));
  }
  return roots;
}

double overlap_exact(const BetaParams& p_in, const BetaParams& q_in) {
  p_in.validate();
  q_in.validate();
  if (p_in == q_in) return 1.0;
  // Fixed argument order makes the result bit-identical under swapping.
  const bool swap = canonical_less(q_in, p_in);
  const BetaParams& p = swap ? q_in : p_in;
  const BetaParams& q = swap ? p_in : q_in;

  const std::vector<double> roots = crossing_points(p, q);
  const LogRatio d(p, q);
  int sign = d.sign_at_zero();
  if (sign == 0) sign = -d.sign_at_one();

  double total = 0.0;
  double left = 0.0;
  for (std::size_t s = 0; s <= roots.size(); ++s) {
    const double right = s < roots.size() ? roots[s] : 1.0;
    // Where p > q the minimum is q, and vice versa.
    total += mass_between(sign > 0 ? q : p, left, right);
    left = right;
    sign = -sign;
  }
  return std::clamp(total, 0.0, 1.0);
}

void GridOverlap::check_step(double step) {
  if (!(step > 0.0 && step <= kMaxGridStep))
    throw std::invalid_argument("grid step must lie in (0, 0.01], got " + std::to_string(step));
}

GridOverlap::GridOverlap(double step) : step_(step) {
  check_step(step);
  const auto count = static_cast<std::size_t>(std::ceil(1.0 / step));
  log_theta_.reserve(count);
  log_one_minus_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = static_cast<double>(i) * step;
    if (theta >= 1.0) break;
    log_theta_.push_back(std::log(theta));  // -inf at theta = 0
    log_one_minus_.push_back(std::log1p(-theta));
  }
}

double GridOverlap::operator()(const BetaParams& p, const BetaParams& q) const {
  p.validate();
  q.validate();
  const double pa = p.alpha - 1.0;
  const double pb = p.beta - 1.0;
  const double qa = q.alpha - 1.0;
  const double qb = q.beta - 1.0;
  const double p_norm = log_beta_function(p.alpha, p.beta);
  const double q_norm = log_beta_function(q.alpha, q.beta);

  // The shape-1 terms vanish identically, including at the theta = 0 limit.
  auto log_density = [](double a1, double b1, double norm, double lt, double l1) {
    double v = -norm;
    if (a1 != 0.0) v += a1 * lt;
    if (b1 != 0.0) v += b1 * l1;
    return v;
  };

  constexpr double kUnderflow = -746.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_theta_.size(); ++i) {
    const double lp = log_density(pa, pb, p_norm, log_theta_[i], log_one_minus_[i]);
    const double lq = log_density(qa, qb, q_norm, log_theta_[i], log_one_minus_[i]);
    const double m = std::min(lp, lq);
    if (m > kUnderflow) sum += std::exp(m);
  }
  return std::clamp(sum * step_, 0.0, 1.0);
}

double overlap_grid(const BetaParams& p, const BetaParams& q, double step) { return GridOverlap(step)(p, q); }

double overlap(const BetaParams& p, const BetaParams& q, const SimilarityOptions& options) {
  if (options.method == OverlapMethod::Exact) return overlap_exact(p, q);
  return overlap_grid(p, q, options.grid_step);
}

}  // namespace betaout
