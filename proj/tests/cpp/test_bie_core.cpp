#include <doctest.h>

#include <cmath>
#include <complex>

#include "cavenc/bie_core.hpp"
#include "cavenc/fixtures.hpp"

using namespace cavenc;
using namespace cavenc::bie;

namespace {

template <class S>
double mag(S x) {
  return std::abs(std::complex<double>(x));
}

// Closed forms for the action of every operator on the constant density 1 on
// the concentric fixture (outer radius R, cavity radius a, impedance rho).
// All follow from the chord substitution dS = 2*pi*(t/s) r dr on spheres.
template <class S>
struct ConcentricForms {
  double a = 0.5, R = 2.0, rho = 2.0;

  S v_sphere(S lam, double s) const {  // single layer on a sphere, on itself
    return (S(1) - std::exp(-2.0 * s * lam)) / lam;
  }
  S v_cross(S lam, double s, double t) const {  // radius s -> radius t
    return (s / (lam * t)) *
           (std::exp(-lam * std::abs(t - s)) - std::exp(-lam * (t + s)));
  }
  S y11(S lam) const {
    return (S(1) - std::exp(-2.0 * R * lam) * (S(1) + R * lam)) / (R * lam);
  }
  S m0(S lam) const {
    return -(S(1) - std::exp(-2.0 * a * lam) * (S(1) + 2.0 * a * lam)) / (2.0 * a * lam);
  }
  S y22(S lam) const { return m0(lam) + (rho - 0.5 / a) * v_sphere(lam, a); }
  S y12(S lam) const {
    return (2.0 * a * std::exp(-lam * R) / (R * R)) * (R + S(1) / lam) * std::sinh(lam * a);
  }
  S y21(S lam) const {
    return (2.0 * R * std::exp(-lam * R) / (a * a)) *
           (a * std::cosh(lam * a) - (1.0 - rho * a) * std::sinh(lam * a) / lam);
  }
};

template <class S>
double rowsum_abs_err(const MatX<S>& A, S want) {
  double e = 0;
  for (int i = 0; i < A.rows(); ++i) e = std::max(e, mag<S>(S(A.row(i).sum()) - want));
  return e;
}

template <class S>
double rowsum_rel_err(const MatX<S>& A, S want) {
  return rowsum_abs_err(A, want) / mag(want);
}

}  // namespace

TEST_CASE("fundamental solution values, real and complex") {
  double r = 0.7;
  CHECK(fundamental_solution<double>(2.0, r) ==
        doctest::Approx(std::exp(-1.4) / (2 * pi * r)).epsilon(1e-15));
  Complex lam(3.0, 1.5);
  Complex want = std::exp(-lam * r) / (2 * pi * r);
  CHECK(mag<Complex>(fundamental_solution<Complex>(lam, r) - want) < 1e-15 * mag(want));
}

TEST_CASE("h0 is identically -1/(2a) between points of a sphere") {
  geom::DiscretizedSurface d = geom::discretize(geom::make_sphere(Vec3(1, -2, 0.5), 0.8), 1);
  for (int i : {0, 3, d.size() / 2})
    for (int j = 0; j < d.size(); ++j) {
      if (i == j) continue;
      double h = h0_kernel(d.points.row(i), d.normals.row(i), d.points.row(j));
      CHECK(std::abs(h - (-1.0 / 1.6)) < 1e-12);
    }
  // h1 = (h0 + rho)/r by definition.
  Vec3 x = d.points.row(0), nu = d.normals.row(0), z = d.points.row(5);
  double r = (x - z).norm();
  CHECK(h1_kernel(x, nu, z, 2.0) ==
        doctest::Approx((h0_kernel(x, nu, z) + 2.0) / r).epsilon(1e-14));
}

TEST_CASE("stacked cavity bookkeeping") {
  fixtures::Fixture fx = fixtures::make_fixture("two_spheres", 1);
  StackedCavities st = stack_cavities(fx.scene);
  CHECK(st.total == fx.scene.total_cavity_nodes);
  CHECK(st.offsets.size() == 2);
  CHECK(st.sizes[0] == fx.scene.cavities[0].size());
  CHECK(st.offsets[1] == st.sizes[0]);
  CHECK(st.rho.minCoeff() == doctest::Approx(1.5));
  CHECK(st.rho.maxCoeff() == doctest::Approx(1.5));
  CHECK(st.points.rows() == st.total);
  CHECK(st.weights.size() == st.total);
}

// Accuracy calibration: cross operators (no singular patch) reach machine
// precision at refinement 2, while patched self blocks carry the partition-
// of-unity quadrature error, measured at ~1e-2 (r1), ~1e-3..1e-2 (r2),
// ~1e-4..1e-3 (r3) in the worst row.  The Robin self coupling is compared on
// the scale of its leading part m0 because this fixture sits exactly at the
// impedance value rho = 1/(2a) * 2 where the two kernel terms cancel in the
// constant action, deflating the closed-form value itself.
TEST_CASE("operator actions on constants match sphere closed forms (real)") {
  fixtures::Fixture fx = fixtures::make_fixture("concentric", 2);
  ConcentricForms<double> cf;
  for (double lam : {3.0, 6.0}) {
    CAPTURE(lam);
    CHECK(rowsum_rel_err(assemble_y11(fx.scene, lam), cf.y11(lam)) < 3e-2);
    CHECK(rowsum_rel_err(assemble_y12(fx.scene, lam), cf.y12(lam)) < 1e-12);
    CHECK(rowsum_rel_err(assemble_y21(fx.scene, lam), cf.y21(lam)) < 1e-12);
    double m0_scale = std::abs(cf.m0(lam));
    CHECK(rowsum_abs_err(assemble_y22(fx.scene, lam), cf.y22(lam)) < 2e-2 * m0_scale);
    CHECK(rowsum_abs_err(assemble_ty22(fx.scene, lam), cf.y22(lam)) < 2e-2 * m0_scale);
    CHECK(rowsum_rel_err(assemble_m0(fx.scene, lam), cf.m0(lam)) < 3e-2);
    CHECK(rowsum_rel_err(assemble_single_layer_cavities(fx.scene, lam),
                         cf.v_sphere(lam, 0.5)) < 3e-2);
    CHECK(rowsum_rel_err(assemble_single_layer_outer_self(fx.scene, lam),
                         cf.v_sphere(lam, 2.0)) < 3e-2);
  }
}

TEST_CASE("patched self blocks converge to the closed forms under refinement") {
  ConcentricForms<double> cf;
  double lam = 6.0;
  double prev_v = 1e300, prev_y = 1e300, prev_o = 1e300;
  double v3 = 0, y3 = 0, o3 = 0;
  for (int r = 1; r <= 3; ++r) {
    fixtures::Fixture fx = fixtures::make_fixture("concentric", r);
    double ev = rowsum_rel_err(assemble_single_layer_cavities(fx.scene, lam),
                               cf.v_sphere(lam, 0.5));
    double ey = rowsum_abs_err(assemble_ty22(fx.scene, lam), cf.y22(lam)) /
                std::abs(cf.m0(lam));
    double eo = rowsum_rel_err(assemble_y11(fx.scene, lam), cf.y11(lam));
    CHECK(ev < 0.6 * prev_v);
    CHECK(ey < 0.6 * prev_y);
    CHECK(eo < 0.6 * prev_o);
    prev_v = ev;
    prev_y = ey;
    prev_o = eo;
    v3 = ev;
    y3 = ey;
    o3 = eo;
  }
  CHECK(v3 < 3e-3);
  CHECK(y3 < 3e-3);
  CHECK(o3 < 5e-3);
}

TEST_CASE("operator actions on constants match sphere closed forms (complex)") {
  fixtures::Fixture fx = fixtures::make_fixture("concentric", 2);
  ConcentricForms<Complex> cf;
  Complex lam(4.0, 2.0);
  CHECK(rowsum_rel_err(assemble_y11(fx.scene, lam), cf.y11(lam)) < 3e-2);
  CHECK(rowsum_rel_err(assemble_y12(fx.scene, lam), cf.y12(lam)) < 1e-12);
  CHECK(rowsum_rel_err(assemble_y21(fx.scene, lam), cf.y21(lam)) < 1e-12);
  CHECK(rowsum_abs_err(assemble_y22(fx.scene, lam), cf.y22(lam)) < 2e-2 * mag(cf.m0(lam)));
  CHECK(rowsum_rel_err(assemble_m0(fx.scene, lam), cf.m0(lam)) < 3e-2);
  CHECK(rowsum_rel_err(assemble_single_layer_cavities(fx.scene, lam),
                       cf.v_sphere(lam, 0.5)) < 3e-2);
}

TEST_CASE("real assembly equals the real part of the complex assembly") {
  fixtures::Fixture fx = fixtures::make_fixture("concentric", 1);
  MatX<double> re = assemble_y22(fx.scene, 6.0);
  MatX<Complex> cx = assemble_y22(fx.scene, Complex(6.0, 0.0));
  CHECK((cx.real() - re).cwiseAbs().maxCoeff() < 1e-14 * re.cwiseAbs().maxCoeff());
  CHECK(cx.imag().cwiseAbs().maxCoeff() == 0.0);
  // Conjugating lambda conjugates the whole operator.
  MatX<Complex> plus = assemble_y11(fx.scene, Complex(4.0, 2.0));
  MatX<Complex> minus = assemble_y11(fx.scene, Complex(4.0, -2.0));
  CHECK((minus - plus.conjugate()).cwiseAbs().maxCoeff() <
        1e-14 * plus.cwiseAbs().maxCoeff());
}

TEST_CASE("off-surface single layer and its normal derivative") {
  fixtures::Fixture fx = fixtures::make_fixture("concentric", 2);
  const geom::DiscretizedSurface& cav = fx.scene.cavities[0];
  ConcentricForms<double> cf;
  double lam = 5.0;

  MatXd targets(2, 3);
  targets.row(0) = Vec3(1.0, 0, 0);           // between cavity and outer wall
  targets.row(1) = Vec3(0, 0, 3.0);           // outside everything
  MatX<double> vals = eval_single_layer(targets, cav, lam);
  REQUIRE(vals.rows() == 2);
  REQUIRE(vals.cols() == cav.size());
  VecX<double> ones = VecX<double>::Ones(cav.size());
  VecX<double> u = eval_single_layer(targets, cav, lam) * ones;
  CHECK(u[0] == doctest::Approx(cf.v_cross(lam, 0.5, 1.0)).epsilon(1e-9));
  CHECK(u[1] == doctest::Approx(cf.v_cross(lam, 0.5, 3.0)).epsilon(1e-9));

  // Normal derivative against a central difference along the direction.
  Vec3 x0(1.2, 0.3, -0.4), n0 = Vec3(0.5, -1, 0.25).normalized();
  MatXd tgt(1, 3), tgt_p(1, 3), tgt_m(1, 3), nrm(1, 3);
  const double eps = 1e-5;
  tgt.row(0) = x0;
  nrm.row(0) = n0;
  tgt_p.row(0) = x0 + eps * n0;
  tgt_m.row(0) = x0 - eps * n0;
  double dn = (eval_single_layer_dnu(tgt, nrm, cav, lam) * ones)(0);
  double fd = ((eval_single_layer(tgt_p, cav, lam) * ones)(0) -
               (eval_single_layer(tgt_m, cav, lam) * ones)(0)) /
              (2 * eps);
  CHECK(dn == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("transpose assembly agrees with the weighted transpose") {
  // Cross-cavity blocks carry no singular patch, so there the algebraic
  // relation tY22_ij / w_j == Y22_ji / w_i holds entry by entry.
  fixtures::Fixture fx = fixtures::make_fixture("two_spheres", 1);
  double lam = 6.0;
  MatX<double> A = assemble_y22(fx.scene, lam);
  MatX<double> At = assemble_ty22(fx.scene, lam);
  StackedCavities st = stack_cavities(fx.scene);
  const int n0 = st.sizes[0];
  int checked = 0;
  for (int i = 0; i < n0; i += 5)
    for (int jj = n0; jj < st.total; jj += 7) {
      double lhs = At(i, jj) / st.weights[jj];
      double rhs = A(jj, i) / st.weights[i];
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(std::abs(lhs), 1e-30));
      ++checked;
    }
  CHECK(checked > 100);

  // Within self blocks the two assemblies patch different kernels, so they
  // agree as bilinear forms rather than entrywise: <tY22 f, g>_w == <f, Y22 g>_w
  // for smooth densities.  The agreement is limited by the quadratic
  // interpolation of the density over the patch stencil (which spans a large
  // fraction of a small cavity), not by kernel quadrature.
  fixtures::Fixture fc = fixtures::make_fixture("concentric", 2);
  MatX<double> Ac = assemble_y22(fc.scene, lam);
  MatX<double> Atc = assemble_ty22(fc.scene, lam);
  StackedCavities sc = stack_cavities(fc.scene);
  VecX<double> f = VecX<double>::Ones(sc.total), g(sc.total);
  // Smooth density without parity (an odd g would pair to ~0 by symmetry).
  for (int i = 0; i < sc.total; ++i) g[i] = std::exp(0.3 * sc.points(i, 0));
  double lhs = (Atc * f).dot(VecX<double>(g.array() * sc.weights.array()));
  double rhs = (Ac * g).dot(VecX<double>(f.array() * sc.weights.array()));
  double scale = std::abs(lhs) + std::abs(rhs);
  CHECK(std::abs(lhs - rhs) < 5e-3 * scale);
}

TEST_CASE("dense solve, resolvent and norm helpers") {
  MatX<double> N(2, 2);
  N << 1, -2, 3, 4;
  CHECK(norm_inf(N) == doctest::Approx(7.0));

  // lu_solve_inplace: A X = B.
  MatX<double> A = MatX<double>::Random(40, 40) * 0.1 + MatX<double>::Identity(40, 40);
  MatX<double> B = MatX<double>::Random(40, 3);
  MatX<double> A0 = A, B0 = B;
  lu_solve_inplace(A, B);
  CHECK((A0 * B - B0).cwiseAbs().maxCoeff() < 1e-12);

  // Singular system reports a numerical failure.
  MatX<double> S = MatX<double>::Zero(3, 3);
  MatX<double> rhs = MatX<double>::Ones(3, 1);
  CHECK_THROWS_AS(lu_solve_inplace(S, rhs), NumericalError);

  // resolvent(A) satisfies R = A + A R exactly.
  MatX<double> C = MatX<double>::Random(30, 30) * 0.02;
  MatX<double> R = resolvent(C);
  CHECK(norm_inf(MatX<double>(R - C - C * R)) < 1e-13);

  Complex one(1.0, 0.0);
  MatX<Complex> Cz = MatX<Complex>::Random(20, 20) * (0.02 * one);
  MatX<Complex> Rz = resolvent(Cz);
  CHECK(norm_inf(MatX<Complex>(Rz - Cz - Cz * Rz)) < 1e-13);
}

TEST_CASE("block split: exact two-level identity and zero diagonal blocks") {
  fixtures::Fixture fx = fixtures::make_fixture("two_spheres", 1);
  double lam = 8.0;
  MatX<double> A = assemble_ty22(fx.scene, lam);
  MatX<double> M = resolvent(A);
  BlockSplit<double> bs = block_split<double>(fx.scene, A, &M);
  CHECK(bs.identity_residual >= 0);
  CHECK(bs.identity_residual < 1e-12);
  REQUIRE(bs.M_diag.size() == 2);
  CHECK(bs.M_diag[0].rows() == fx.scene.cavities[0].size());
  CHECK(block_envelope(fx.scene, bs.W, 0, 0) == 0.0);
  CHECK(block_envelope(fx.scene, bs.W, 1, 1) == 0.0);
  CHECK(block_envelope(fx.scene, bs.W, 0, 1) > 0.0);
  // Winf = W (I - W)^{-1} satisfies its own resolvent identity.
  CHECK(norm_inf(MatX<double>(bs.Winf - bs.W - bs.W * bs.Winf)) < 1e-12);
}

TEST_CASE("probe-rescaled assemblies are exact similarities off the patches") {
  fixtures::Fixture fx = fixtures::make_fixture("two_spheres", 1);
  Vec3 p(5, 0, 0);
  StackedCavities st = stack_cavities(fx.scene);

  double lam = 4.0;  // moderate: the plain similarity is still well scaled
  MatX<double> At = assemble_ty22(fx.scene, lam);
  MatX<double> Ap = assemble_ty22_pscaled(fx.scene, lam, p);
  MatX<double> M0 = assemble_m0(fx.scene, lam);
  MatX<double> M0p = assemble_m0_pscaled(fx.scene, lam, p);
  VecXd dp(st.total);
  for (int i = 0; i < st.total; ++i) dp[i] = (Vec3(st.points.row(i)) - p).norm();

  // Cross-cavity entries are plain quadrature in both assemblies, so the
  // similarity factor exp(lambda(dp_i - dp_j)) relates them exactly.  (Self
  // blocks patch the scaled and unscaled kernels separately and only agree
  // as operators.)
  const int n0 = st.sizes[0];
  for (int i = 0; i < st.total; i += 3)
    for (int j = 0; j < st.total; j += 5) {
      if ((i < n0) == (j < n0)) continue;
      double factor = std::exp(lam * (dp[i] - dp[j]));
      CHECK(std::abs(Ap(i, j) - At(i, j) * factor) <=
            1e-12 * std::max(std::abs(Ap(i, j)), 1e-300));
      CHECK(std::abs(M0p(i, j) - M0(i, j) * factor) <=
            1e-12 * std::max(std::abs(M0p(i, j)), 1e-300));
    }

  // Coarse operator-level sanity on the patched self block: undoing the
  // scaling on a constant-density image recovers the sphere row sum of tY22.
  // The patch interpolates the *scaled* density, which is not polynomial over
  // the chart, so this holds at the patch's working accuracy only; the
  // precision claim for the rescaled machinery is the agreement of the two
  // independent indicator routes, tested in the forward-indicator suite.
  fixtures::Fixture fc = fixtures::make_fixture("concentric", 2);
  Vec3 pc(3, 0, 0);
  double lam_act = 0.5;
  StackedCavities sc = stack_cavities(fc.scene);
  MatX<double> Apc = assemble_ty22_pscaled(fc.scene, lam_act, pc);
  double dmin = 1e300;
  VecXd dc(sc.total);
  for (int i = 0; i < sc.total; ++i) {
    dc[i] = (Vec3(sc.points.row(i)) - pc).norm();
    dmin = std::min(dmin, dc[i]);
  }
  VecX<double> u(sc.total);
  for (int i = 0; i < sc.total; ++i) u[i] = std::exp(lam_act * (dc[i] - dmin));
  VecX<double> v = Apc * u;
  ConcentricForms<double> cf;
  double want = cf.y22(lam_act);
  double worst = 0;
  for (int i = 0; i < sc.total; ++i) {
    double unscaled = v[i] * std::exp(-lam_act * (dc[i] - dmin));
    worst = std::max(worst, std::abs(unscaled - want));
  }
  CHECK(worst < 2e-2 * std::abs(want));

  // Deep-decay regime: the direct similarity would need exp(+lambda*|xi-p|)
  // factors ~ e^{280}; the rescaled assembly must remain finite.
  MatX<double> Abig = assemble_ty22_pscaled(fx.scene, 40.0, p);
  CHECK(Abig.allFinite());
  CHECK(norm_inf(Abig) < 20.0);
}
