#include "cavenc/laplace_asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "cavenc/geometry.hpp"

namespace cavenc::lap {

namespace {

// 1-D node/weight set on [-box, box] with geometric panels shrinking toward 0,
// resolving features down to scale ~ box / 2^K.
void peaked_axis_rule(double box, double mu, std::vector<double>& x, std::vector<double>& w) {
  const int order = 12;
  VecXd gx, gw;
  geom::gauss_legendre(order, gx, gw);
  const int K = std::clamp(
      static_cast<int>(std::ceil(std::log2(std::max(1.0, box * std::sqrt(mu / 2.0))))) + 1, 1,
      18);
  x.clear();
  w.clear();
  for (int sign = -1; sign <= 1; sign += 2) {
    for (int k = 0; k <= K; ++k) {
      double hi = box * std::pow(0.5, k);
      double lo = (k == K) ? 0.0 : 0.5 * hi;
      for (int q = 0; q < order; ++q) {
        x.push_back(sign * (0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[q]));
        w.push_back(0.5 * (hi - lo) * gw[q]);
      }
    }
  }
}

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  auto f = [](double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; };
  double a = f(1.0 - s), b = f(s);
  return a / (a + b);
}

// C^infinity radial cutoff: 1 for r <= r0, 0 for r >= r1.
double bump(double r, double r0, double r1) { return smooth_step((r - r0) / (r1 - r0)); }

}  // namespace

Complex quadrature_value(const IntegralSpec& spec, Complex lam) {
  double mu = lam.real();
  if (mu <= 0) throw UsageError("laplace quadrature needs Re lambda > 0");
  std::vector<double> x, w;
  peaked_axis_rule(spec.box, mu, x, w);
  Complex acc(0, 0);
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = 0; j < x.size(); ++j) {
      Vec2 s(x[i], x[j]);
      double ph = spec.phi(s);
      if (ph == 0.0) continue;
      double Sv = spec.S(s);
      if (mu * (Sv - spec.S0) > 745.0) continue;  // below double underflow
      acc += w[i] * w[j] * std::exp(-lam * Sv) * ph * spec.h(s, lam);
    }
  }
  return acc;
}

Complex quadrature_value_1d(const std::function<double(double)>& S,
                            const std::function<double(double)>& phi,
                            const std::function<Complex(double, Complex)>& h, double box,
                            Complex lam) {
  double mu = lam.real();
  if (mu <= 0) throw UsageError("laplace quadrature needs Re lambda > 0");
  std::vector<double> x, w;
  peaked_axis_rule(box, mu, x, w);
  Complex acc(0, 0);
  for (size_t i = 0; i < x.size(); ++i) {
    double ph = phi(x[i]);
    if (ph == 0.0) continue;
    acc += w[i] * std::exp(-lam * S(x[i])) * ph * h(x[i], lam);
  }
  return acc;
}

Complex gauss_integral_1d(const std::function<Complex(double)>& f, double lo, double hi,
                          int panels, int order) {
  VecXd gx, gw;
  geom::gauss_legendre(order, gx, gw);
  Complex acc(0, 0);
  double hp = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    double a = lo + k * hp;
    for (int q = 0; q < order; ++q)
      acc += 0.5 * hp * gw[q] * f(a + 0.5 * hp * (1.0 + gx[q]));
  }
  return acc;
}

Complex nondegenerate_asymptotic(const IntegralSpec& spec, Complex lam) {
  if (spec.det_hess <= 0)
    throw NumericalError("asymptotic formula needs a non-degenerate phase Hessian");
  Complex pref = (2.0 * pi / lam) / std::sqrt(spec.det_hess);
  return pref * std::exp(-lam * spec.S0) * spec.phi(Vec2::Zero()) * spec.h(Vec2::Zero(), lam);
}

InvariantSample sample_invariants(const IntegralSpec& spec, Complex lam_probe, int n) {
  InvariantSample out;
  double smin = spec.S(Vec2::Zero());
  out.min_at_origin = true;
  out.quadratic_upper = true;
  out.amplitude_ok = true;
  double c0 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec2 s(-spec.box + 2.0 * spec.box * i / (n - 1), -spec.box + 2.0 * spec.box * j / (n - 1));
      double Sv = spec.S(s);
      if (Sv < smin - 1e-12) out.min_at_origin = false;
      double r2 = s.squaredNorm();
      if (r2 > 1e-12) c0 = std::max(c0, (Sv - spec.S0) / r2);
      if (spec.phi(s) > 0.0) {
        Complex hv = spec.h(s, lam_probe);
        if (!std::isfinite(std::abs(hv))) out.amplitude_ok = false;
      }
    }
  }
  out.c0 = c0;
  out.quadratic_upper = std::isfinite(c0);
  if (std::abs(smin - spec.S0) > 1e-12) out.min_at_origin = false;
  return out;
}

DegenerateAudit degenerate_lower_bound_audit(const IntegralSpec& spec,
                                             const std::vector<Complex>& grid) {
  DegenerateAudit out;
  out.lambdas = grid;
  const double n_half = 1.0;  // n = 2
  for (Complex lam : grid) {
    Complex I = quadrature_value(spec, lam);
    double level = std::pow(lam.real(), n_half) * (std::exp(lam * spec.S0) * I).real();
    out.levels.push_back(level);
  }
  out.min_level = *std::min_element(out.levels.begin(), out.levels.end());
  out.max_level = *std::max_element(out.levels.begin(), out.levels.end());
  out.positive = out.min_level > 0.0;
  return out;
}

IntegralSpec gaussian_spec() {
  IntegralSpec s;
  s.name = "gaussian";
  s.S = [](const Vec2& v) { return v.squaredNorm(); };
  s.phi = [](const Vec2& v) { return bump(v.norm(), 0.7, 1.2); };
  s.h = [](const Vec2&, Complex) { return Complex(1, 0); };
  s.box = 1.2;
  s.S0 = 0.0;
  s.det_hess = 4.0;
  return s;
}

IntegralSpec aniso_quad_spec() {
  IntegralSpec s;
  s.name = "aniso_quad";
  s.S = [](const Vec2& v) { return v[0] * v[0] + 4.0 * v[1] * v[1]; };
  s.phi = [](const Vec2& v) { return bump(v.norm(), 0.7, 1.2); };
  s.h = [](const Vec2&, Complex) { return Complex(1, 0); };
  s.box = 1.2;
  s.S0 = 0.0;
  s.det_hess = 16.0;
  return s;
}

IntegralSpec anisotropic_spec() {
  IntegralSpec s;
  s.name = "anisotropic";
  s.S = [](const Vec2& v) {
    return v[0] * v[0] + 2.0 * v[1] * v[1] + 0.3 * v[0] * v[0] * v[0];
  };
  s.phi = [](const Vec2& v) { return bump(v.norm(), 0.7, 1.2); };
  s.h = [](const Vec2& v, Complex) { return Complex(1.0 + v[0], 0); };
  s.box = 1.2;
  s.S0 = 0.0;
  s.det_hess = 8.0;
  return s;
}

IntegralSpec degenerate_spec() {
  IntegralSpec s;
  s.name = "degenerate";
  s.S = [](const Vec2& v) { return v[0] * v[0] + std::pow(v[1], 4); };
  s.phi = [](const Vec2& v) { return bump(v.norm(), 0.7, 1.2); };
  s.h = [](const Vec2&, Complex) { return Complex(1, 0); };
  s.box = 1.2;
  s.S0 = 0.0;
  s.det_hess = -1.0;
  return s;
}

IntegralSpec holder_spec() {
  IntegralSpec s;
  s.name = "holder";
  s.S = [](const Vec2& v) { return v.squaredNorm(); };
  s.phi = [](const Vec2& v) { return bump(v.norm(), 0.7, 1.2); };
  s.h = [](const Vec2& v, Complex) { return Complex(1.0 + std::sqrt(v.norm()), 0); };
  s.box = 1.2;
  s.S0 = 0.0;
  s.det_hess = 4.0;
  return s;
}

}  // namespace cavenc::lap
