#include "cavenc/forward_indicator.hpp"

#include <cmath>
#include <type_traits>

namespace cavenc::fwd {

using bie::StackedCavities;
using geom::Scene;

namespace {
inline double real_of(double v) { return v; }
inline double real_of(const Complex& v) { return v.real(); }
}  // namespace

template <class S>
S flux_transform(const geom::FluxSpec& flux, S lam) {
  S lam2 = lam * lam;
  if (real_of(lam2) * flux.T < -700.0)
    throw NumericalError("flux transform overflows: Re(lambda^2) T < -700");
  S em = std::exp(-lam2 * flux.T);
  if (flux.kind == "constant") {
    return S(flux.value) * (S(1) - em) / lam2;
  }
  if (flux.kind == "linear") {
    // f(t) = f0 + slope t on [0, T].
    return S(flux.f0) * (S(1) - em) / lam2 +
           S(flux.slope) * (S(1) - em * (S(1) + lam2 * S(flux.T))) / (lam2 * lam2);
  }
  throw UsageError("unknown flux kind: " + flux.kind);
}

template <class S>
Densities<S> solve_densities(const Scene& scene, S lam) {
  const int n1 = scene.outer.size();
  const int n2 = scene.total_cavity_nodes;
  Densities<S> out;
  out.g = flux_transform(scene.flux, lam);

  MatX<S> sys = MatX<S>::Zero(n1 + n2, n1 + n2);
  sys.topLeftCorner(n1, n1) = -bie::assemble_y11(scene, lam);
  sys.topLeftCorner(n1, n1).diagonal().array() += S(1);
  if (n2 > 0) {
    sys.topRightCorner(n1, n2) = -bie::assemble_y12(scene, lam);
    sys.bottomLeftCorner(n2, n1) = -bie::assemble_y21(scene, lam);
    sys.bottomRightCorner(n2, n2) = -bie::assemble_y22(scene, lam);
    sys.bottomRightCorner(n2, n2).diagonal().array() += S(1);
  }
  MatX<S> rhs = MatX<S>::Zero(n1 + n2, 1);
  rhs.topRows(n1).setConstant(out.g);
  bie::lu_solve_inplace(sys, rhs);
  out.phi = rhs.col(0).head(n1);
  out.psi = rhs.col(0).tail(n2);
  return out;
}

template <class S>
double density_system_residual(const Scene& scene, S lam, const Densities<S>& d) {
  const int n1 = scene.outer.size();
  const int n2 = scene.total_cavity_nodes;
  VecX<S> r1 = d.phi - VecX<S>(bie::assemble_y11(scene, lam) * d.phi);
  r1.array() -= d.g;
  VecX<S> r2;
  if (n2 > 0) {
    r1 -= VecX<S>(bie::assemble_y12(scene, lam) * d.psi);
    r2 = d.psi - VecX<S>(bie::assemble_y21(scene, lam) * d.phi) -
         VecX<S>(bie::assemble_y22(scene, lam) * d.psi);
  } else {
    r2 = VecX<S>::Zero(0);
  }
  double scale = std::max(std::abs(d.g), 1e-300);
  double rn = 0.0;
  for (int i = 0; i < n1; ++i) rn = std::max(rn, std::abs(r1[i]));
  for (int i = 0; i < n2; ++i) rn = std::max(rn, std::abs(r2[i]));
  return rn / scale;
}

template <class S>
VecX<S> w0_on_cavities(const Scene& scene, S lam, const Densities<S>& d) {
  StackedCavities st = bie::stack_cavities(scene);
  VecX<S> w0 = VecX<S>::Zero(st.total);
  // Outer contribution: smooth cross evaluation.
  w0 += bie::eval_single_layer(st.points, scene.outer, lam) * d.phi;
  // Cavity self contribution: patched single layer on the stacked cavities.
  w0 += bie::assemble_single_layer_cavities(scene, lam) * d.psi;
  return w0;
}

template <class S>
VecX<S> w0_on_outer(const Scene& scene, S lam, const Densities<S>& d) {
  VecX<S> w0 = bie::assemble_single_layer_outer_self(scene, lam) * d.phi;
  for (int k = 0; k < scene.n_cavities(); ++k) {
    int off = scene.cavity_offsets[k];
    int sz = scene.cavities[k].size();
    w0 += bie::eval_single_layer(scene.outer.points, scene.cavities[k], lam) *
          d.psi.segment(off, sz);
  }
  return w0;
}

template <class S>
S indicator_direct(const Scene& scene, S lam, const Vec3& p, const Densities<S>&,
                   const VecX<S>& w0_cav) {
  StackedCavities st = bie::stack_cavities(scene);
  S acc = S(0);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xi = st.points.row(i), nu = st.normals.row(i);
    Vec3 dvec = p - xi;
    double r = dvec.norm();
    double h0 = nu.dot(dvec) / (r * r);
    S kern = std::exp(-lam * r) / (2.0 * pi) * (lam * h0 + S((h0 + st.rho[i]) / r));
    acc += kern * w0_cav[i] * S(st.weights[i]);
  }
  return acc;
}

template <class S>
KernelRouteResult<S> indicator_kernel_route(const Scene& scene, S lam, const Vec3& p,
                                            const Densities<S>& d) {
  StackedCavities st = bie::stack_cavities(scene);
  const int n = st.total;
  KernelRouteResult<S> out{S(0), S(0), S(0)};
  if (n == 0) return out;

  // Probe-rescaled reflection machinery.  With D = diag(exp(-lam |x_i - p|)),
  // Ahat = D^{-1} (tY22) D has entries bounded by 1, and with the rescaled
  // source ehat[i] = 1/|x_i - p| the full resolvent correction of the kernel
  // expansion, evaluated with its exp(+lam |xi - p|) prefactor, is exactly
  //   Fhat = Ahat (I - Ahat)^{-1} ehat
  // (the prefactor cancels the rescaling, so nothing large is ever formed).
  MatX<S> Ahat = bie::assemble_ty22_pscaled(scene, lam, p);
  VecX<S> ehat(n);
  for (int i = 0; i < n; ++i) ehat[i] = S(1.0 / (Vec3(st.points.row(i)) - p).norm());
  MatX<S> sys = -Ahat;
  sys.diagonal().array() += S(1);
  MatX<S> rhs = ehat;
  bie::lu_solve_inplace(sys, rhs);
  VecX<S> Ftot = Ahat * VecX<S>(rhs.col(0));

  const auto& outer = scene.outer;
  S I00 = S(0), I01 = S(0);
  for (int iy = 0; iy < outer.size(); ++iy) {
    const Vec3 y = outer.points.row(iy);
    S wphi = d.phi[iy] * S(outer.weights[iy]);
    S s00 = S(0), s01 = S(0);
    for (int ix = 0; ix < n; ++ix) {
      const Vec3 xi = st.points.row(ix), nu = st.normals.row(ix);
      Vec3 dp = p - xi;
      Vec3 dy = y - xi;
      double rp = dp.norm(), ry = dy.norm();
      double h0y = nu.dot(dy) / (ry * ry);
      double hplus = nu.dot(dp / rp + dy / ry) / (rp * ry);
      double h1p = (nu.dot(dp) / (rp * rp) + st.rho[ix]) / rp;
      double h1y = (h0y + st.rho[ix]) / ry;
      S F = Ftot[ix];
      S G0 = S(hplus) + S(2.0 * h0y) * F;
      S G1 = S(h1p / ry) + S(h1y / rp) + S(2.0 * h1y) * F;
      S ef = std::exp(-lam * (rp + ry)) * S(st.weights[ix]);
      s00 += ef * G0;
      s01 += ef * G1;
    }
    I00 += wphi * s00;
    I01 += wphi * s01;
  }
  const double c = 1.0 / (4.0 * pi * pi);
  out.I00 = c * I00;
  out.I01 = c * I01;
  out.I0 = lam * out.I00 + out.I01;
  return out;
}

template <class S>
S indicator_boundary_data_form(const Scene& scene, S lam, const Vec3& p,
                               const Densities<S>& d) {
  VecX<S> w0 = w0_on_outer(scene, lam, d);
  const auto& outer = scene.outer;
  S acc = S(0);
  for (int i = 0; i < outer.size(); ++i) {
    const Vec3 y = outer.points.row(i), nu = outer.normals.row(i);
    Vec3 dvec = p - y;
    double r = dvec.norm();
    double h0 = nu.dot(dvec) / (r * r);
    S E = std::exp(-lam * r) / (2.0 * pi * r);
    S dnuE = std::exp(-lam * r) / (2.0 * pi) * (lam + S(1.0 / r)) * S(h0);
    acc += (dnuE * w0[i] - E * d.g) * S(outer.weights[i]);
  }
  return acc;
}

template <class S>
S indicator_psi_outer_form(const Scene& scene, S lam, const Vec3& p, const Densities<S>& d) {
  const auto& outer = scene.outer;
  const int n1 = outer.size();
  VecX<S> vD = VecX<S>::Zero(n1);
  VecX<S> dvD = VecX<S>::Zero(n1);
  for (int k = 0; k < scene.n_cavities(); ++k) {
    int off = scene.cavity_offsets[k];
    int sz = scene.cavities[k].size();
    vD += bie::eval_single_layer(outer.points, scene.cavities[k], lam) * d.psi.segment(off, sz);
    dvD += bie::eval_single_layer_dnu(outer.points, outer.normals, scene.cavities[k], lam) *
           d.psi.segment(off, sz);
  }
  S acc = S(0);
  for (int i = 0; i < n1; ++i) {
    const Vec3 y = outer.points.row(i), nu = outer.normals.row(i);
    Vec3 dvec = p - y;
    double r = dvec.norm();
    double h0 = nu.dot(dvec) / (r * r);
    S E = std::exp(-lam * r) / (2.0 * pi * r);
    S dnuE = std::exp(-lam * r) / (2.0 * pi) * (lam + S(1.0 / r)) * S(h0);
    acc += (dnuE * vD[i] - E * dvD[i]) * S(outer.weights[i]);
  }
  return acc;
}

IndicatorSample run_indicator(const Scene& scene, Complex lam, const Vec3& p) {
  IndicatorSample s;
  s.lambda = lam;
  if (lam.imag() == 0.0) {
    double rl = lam.real();
    auto d = solve_densities<double>(scene, rl);
    auto w0c = w0_on_cavities<double>(scene, rl, d);
    double direct = indicator_direct<double>(scene, rl, p, d, w0c);
    auto kr = indicator_kernel_route<double>(scene, rl, p, d);
    s.I0_direct = Complex(direct, 0.0);
    s.I0_kernel = Complex(kr.I0, 0.0);
  } else {
    auto d = solve_densities<Complex>(scene, lam);
    auto w0c = w0_on_cavities<Complex>(scene, lam, d);
    s.I0_direct = indicator_direct<Complex>(scene, lam, p, d, w0c);
    s.I0_kernel = indicator_kernel_route<Complex>(scene, lam, p, d).I0;
  }
  double denom = std::max(std::abs(s.I0_direct), std::abs(s.I0_kernel));
  s.route_rel_diff = denom > 0 ? std::abs(s.I0_direct - s.I0_kernel) / denom : 0.0;
  return s;
}

#define CAVENC_FWD_INSTANTIATE(S)                                                          \
  template S flux_transform<S>(const geom::FluxSpec&, S);                                  \
  template Densities<S> solve_densities<S>(const Scene&, S);                               \
  template double density_system_residual<S>(const Scene&, S, const Densities<S>&);        \
  template VecX<S> w0_on_cavities<S>(const Scene&, S, const Densities<S>&);                \
  template VecX<S> w0_on_outer<S>(const Scene&, S, const Densities<S>&);                   \
  template S indicator_direct<S>(const Scene&, S, const Vec3&, const Densities<S>&,        \
                                 const VecX<S>&);                                          \
  template KernelRouteResult<S> indicator_kernel_route<S>(const Scene&, S, const Vec3&,    \
                                                          const Densities<S>&);            \
  template S indicator_boundary_data_form<S>(const Scene&, S, const Vec3&,                 \
                                             const Densities<S>&);                         \
  template S indicator_psi_outer_form<S>(const Scene&, S, const Vec3&, const Densities<S>&);

CAVENC_FWD_INSTANTIATE(double)
CAVENC_FWD_INSTANTIATE(Complex)
#undef CAVENC_FWD_INSTANTIATE

}  // namespace cavenc::fwd
