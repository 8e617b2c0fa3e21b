#pragma once

#include <stdexcept>
#include <string>

namespace betaout {

/// Raised when an argument lies outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shape parameters (a, b) of a Beta distribution.
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  /// Throws DomainError unless both shapes are finite and positive.
  static BetaParams make(double alpha, double beta);
  void validate() const;

  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// Lower and upper tail of the regularized incomplete beta function.
/// Whichever tail is evaluated directly carries full relative accuracy;
/// the other is its complement.
struct BetaTails {
  double lower = 0.0;
  double upper = 1.0;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)], the Stirling remainder.
double stirling_correction(double x);

/// ln B(a, b), evaluated without forming the individual Gamma terms for large
/// arguments.
double log_beta_function(double a, double b);

/// ln of the Beta density at theta in (0, 1).
double log_beta_pdf(double theta, const BetaParams& params);

/// Beta density on the closed interval [0, 1]; endpoints take their one-sided
/// limits (which may be +inf for shapes below one).
double beta_pdf(double theta, const BetaParams& params);

/// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, const BetaParams& params);

/// 1 - I_x(a, b), accurate in the far upper tail.
double beta_sf(double x, const BetaParams& params);

BetaTails beta_tails(double x, const BetaParams& params);

}  // namespace betaout
