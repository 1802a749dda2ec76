#pragma once

// Laplace-type integrals with complex parameter: numerical quadrature, the
// non-degenerate leading-order expansion, a degenerate lower-bound audit, and
// remainder fits for rough amplitudes.
//
// The object of study is
//   I(lambda) = int_{[-box,box]^2} e^{-lambda S(sigma)} phi(sigma) h(sigma; lambda) dsigma
// with a phase S minimized at the origin, a compactly supported cutoff phi
// with phi(0) = 1, and an amplitude h that may itself depend on lambda.
// Everything is numerical-first: quadrature provides the oracle, asymptotic
// formulas are checked against it.

#include <functional>
#include <string>
#include <vector>

#include "cavenc/common.hpp"

namespace cavenc::lap {

struct IntegralSpec {
  std::function<double(const Vec2&)> S;
  std::function<double(const Vec2&)> phi;
  std::function<Complex(const Vec2&, Complex)> h;
  double box = 1.2;      ///< integration half-width per axis
  double S0 = 0.0;       ///< inf S, attained at the origin
  double det_hess = -1;  ///< det Hess S(0) if the minimum is non-degenerate, else < 0
  std::string name;
};

/// Tensor-product quadrature of the integral, with per-axis geometric panel
/// refinement toward the phase minimum so that both the O(1/sqrt(mu)) peak and
/// the smooth tail are resolved at every Re(lambda) = mu > 0.
Complex quadrature_value(const IntegralSpec& spec, Complex lam);

/// One-dimensional analogue over [-box, box] (used by closed-form checks and
/// the monotone-phase substitution identity).
Complex quadrature_value_1d(const std::function<double(double)>& S,
                            const std::function<double(double)>& phi,
                            const std::function<Complex(double, Complex)>& h, double box,
                            Complex lam);

/// Composite Gauss-Legendre integration of a complex integrand on [lo, hi].
Complex gauss_integral_1d(const std::function<Complex(double)>& f, double lo, double hi,
                          int panels = 64, int order = 12);

/// Leading-order expansion at a non-degenerate minimum (n = 2):
///   (2 pi / lambda)^{n/2} (det Hess S(0))^{-1/2} e^{-lambda S0} phi(0) h(0; lambda).
Complex nondegenerate_asymptotic(const IntegralSpec& spec, Complex lam);

/// Sampled invariant checks: S minimized at 0 with value S0, quadratic upper
/// bound S - S0 <= C0 |sigma|^2 near 0, amplitude bounded with Re h bounded
/// below on the cutoff support.
struct InvariantSample {
  bool min_at_origin = false;
  bool quadratic_upper = false;
  bool amplitude_ok = false;
  double c0 = 0.0;  ///< fitted quadratic-bound constant
  bool all_ok() const { return min_at_origin && quadratic_upper && amplitude_ok; }
};
InvariantSample sample_invariants(const IntegralSpec& spec, Complex lam_probe, int n = 41);

/// Degenerate lower-bound audit: evaluates mu^{n/2} Re(e^{lambda S0} I(lambda))
/// over a lambda grid and reports positivity plus the level band.
struct DegenerateAudit {
  std::vector<Complex> lambdas;
  std::vector<double> levels;
  double min_level = 0.0, max_level = 0.0;
  bool positive = false;
  bool within_factor(double f) const {
    return positive && max_level <= f * min_level;
  }
};
DegenerateAudit degenerate_lower_bound_audit(const IntegralSpec& spec,
                                             const std::vector<Complex>& grid);

/// Shipped example specs.
IntegralSpec gaussian_spec();     ///< S = |sigma|^2, h = 1: I = pi/lambda up to cutoff tails
IntegralSpec aniso_quad_spec();   ///< S = s1^2 + 4 s2^2, h = 1: I = pi/(2 lambda)
IntegralSpec anisotropic_spec();  ///< S = s1^2 + 2 s2^2 + 0.3 s1^3, h = 1 + s1
IntegralSpec degenerate_spec();   ///< S = s1^2 + s2^4: quartic direction, singular Hessian
IntegralSpec holder_spec();       ///< h = 1 + |sigma|^{1/2}: Hoelder-rough amplitude

}  // namespace cavenc::lap
