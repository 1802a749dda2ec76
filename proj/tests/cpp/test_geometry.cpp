#include <doctest.h>

#include <cmath>

#include "cavenc/fixtures.hpp"
#include "cavenc/geometry.hpp"

using namespace cavenc;
using namespace cavenc::geom;

TEST_CASE("gauss-legendre rule integrates high-degree polynomials exactly") {
  VecXd x, w;
  gauss_legendre(8, x, w);
  REQUIRE(x.size() == 8);
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  // 8-point rule is exact through degree 15.
  double m14 = 0, m15 = 0;
  for (int i = 0; i < 8; ++i) {
    m14 += w[i] * std::pow(x[i], 14);
    m15 += w[i] * std::pow(x[i], 15);
  }
  CHECK(m14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  CHECK(std::abs(m15) < 1e-14);  // odd moment, zero up to roundoff
}

TEST_CASE("sphere discretization: area, normals, centroid") {
  SurfaceSpec s = make_sphere(Vec3(0.3, -0.1, 0.2), 2.0);
  DiscretizedSurface d = discretize(s, 2);
  CHECK(d.size() == d.n_theta * d.n_phi);
  CHECK(d.area() == doctest::Approx(4.0 * pi * 4.0).epsilon(1e-12));
  for (int i = 0; i < d.size(); ++i) {
    Vec3 x = d.points.row(i), nu = d.normals.row(i);
    CHECK(std::abs(nu.norm() - 1.0) < 1e-12);
    CHECK(s.implicit(x) == doctest::Approx(1.0).epsilon(1e-12));
    // Outward: normal aligned with the radial direction.
    CHECK(nu.dot(x - s.center) > 0);
    CHECK(d.weights[i] > 0);
  }
  // First moment of the surface measure sits at the center by symmetry.
  Vec3 centroid = (d.points.transpose() * d.weights) / d.area();
  CHECK((centroid - s.center).norm() < 1e-12);
}

TEST_CASE("ellipsoid quadrature satisfies the divergence-theorem identity") {
  // For any closed surface, int nu . (x - c) dS = 3 Vol = 4 pi a b c.
  Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 0.5).normalized()).toRotationMatrix();
  SurfaceSpec e = make_ellipsoid(Vec3(0.4, 0.0, -0.3), Vec3(1.0, 0.6, 0.8), R);
  DiscretizedSurface d = discretize(e, 3);
  double flux = 0;
  Vec3 normal_sum = Vec3::Zero();
  for (int i = 0; i < d.size(); ++i) {
    Vec3 x = d.points.row(i), nu = d.normals.row(i);
    flux += d.weights[i] * nu.dot(x - e.center);
    normal_sum += d.weights[i] * nu;
  }
  CHECK(flux == doctest::Approx(4.0 * pi * 1.0 * 0.6 * 0.8).epsilon(1e-10));
  CHECK(normal_sum.norm() < 1e-10);  // closed surface: int nu dS = 0
}

TEST_CASE("parametric points and normals are consistent with the implicit form") {
  SurfaceSpec e = make_ellipsoid(Vec3::Zero(), Vec3(2.0, 1.0, 1.5));
  for (double u : {-0.9, -0.3, 0.0, 0.55, 0.99}) {
    for (double phi : {0.0, 1.1, 3.9}) {
      Vec3 x = e.point_uphi(u, phi);
      CHECK(e.implicit(x) == doctest::Approx(1.0).epsilon(1e-13));
      Vec3 nu = e.outward_normal(x);
      // Exact normal of the quadric: parallel to Q (x - c).
      Vec3 grad = e.quadric() * (x - e.center);
      CHECK((nu - grad.normalized()).norm() < 1e-13);
    }
  }
}

TEST_CASE("local chart reproduces the surface exactly") {
  Mat3 R = Eigen::AngleAxisd(0.5, Vec3(0, 1, 1).normalized()).toRotationMatrix();
  SurfaceSpec e = make_ellipsoid(Vec3(0.1, 0.2, -0.1), Vec3(1.0, 0.6, 0.8), R);
  DiscretizedSurface d = discretize(e, 1);
  for (int i : {0, 7, d.size() / 2, d.size() - 1}) {
    LocalChart c = local_chart(e, d.points.row(i));
    CHECK(c.g(Vec2::Zero()) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.grad_g(Vec2::Zero()).norm() < 1e-12);
    CHECK(c.jacobian(Vec2::Zero()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((c.surface_normal(Vec2::Zero()) - Vec3(d.normals.row(i))).norm() < 1e-12);
    // Frame is orthonormal.
    CHECK(std::abs(c.e1.dot(c.e2)) < 1e-13);
    CHECK(std::abs(c.e1.dot(c.nu)) < 1e-13);
    for (double s1 : {-0.2, 0.15})
      for (double s2 : {-0.18, 0.1}) {
        Vec2 sig(s1, s2);
        if (sig.norm() > c.radius) continue;
        Vec3 x = c.point(sig);
        CHECK(e.implicit(x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.g(sig) > 0);  // convexity: graph bends away from the tangent plane
        // Chart normal equals the quadric normal at the mapped point.
        CHECK((c.surface_normal(sig) - e.outward_normal(x)).norm() < 1e-12);
        // Finite-difference check of grad_g.
        const double h = 1e-6;
        Vec2 gfd((c.g(sig + Vec2(h, 0)) - c.g(sig - Vec2(h, 0))) / (2 * h),
                 (c.g(sig + Vec2(0, h)) - c.g(sig - Vec2(0, h))) / (2 * h));
        CHECK((c.grad_g(sig) - gfd).norm() < 1e-8);
      }
  }
}

TEST_CASE("chart hessian at the base point gives the principal curvatures") {
  SurfaceSpec s = make_sphere(Vec3::Zero(), 2.0);
  LocalChart c = local_chart(s, Vec3(2, 0, 0));
  Mat2 H = c.hess_g(Vec2::Zero());
  // Sphere of radius 2: both principal curvatures are 1/2.
  Eigen::SelfAdjointEigenSolver<Mat2> es(H);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(0.5).epsilon(1e-12));

  // Ellipsoid (a,b,c) at the end of the a-axis: curvatures b/a^2... use
  // (2,1,1): at (2,0,0) both sectional curvatures are a/b^2 = 2.
  SurfaceSpec e = make_ellipsoid(Vec3::Zero(), Vec3(2.0, 1.0, 1.0));
  LocalChart ce = local_chart(e, Vec3(2, 0, 0));
  Eigen::SelfAdjointEigenSolver<Mat2> ese(ce.hess_g(Vec2::Zero()));
  CHECK(ese.eigenvalues()[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ese.eigenvalues()[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("convexity audit pins the support constants of a sphere") {
  SurfaceSpec s = make_sphere(Vec3(1, 0, 0), 0.5);
  ConvexityAudit a = convexity_audit(s, 3);
  CHECK(a.strictly_convex);
  // For a sphere of radius r the support quotient is identically 1/(2r).
  CHECK(a.M0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a.M1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a.kappa_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.kappa_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.chart_sandwich_slack < 1e-9);
}

TEST_CASE("convexity audit on a triaxial ellipsoid") {
  SurfaceSpec e = make_ellipsoid(Vec3::Zero(), Vec3(1.0, 0.6, 0.8));
  ConvexityAudit a = convexity_audit(e, 3);
  CHECK(a.strictly_convex);
  CHECK(a.M0 > 0);
  CHECK(a.M0 <= a.M1);
  // Curvature extremes of an ellipsoid: kmin = c_min/c_max^2, kmax = c_max/c_min^2.
  CHECK(a.kappa_min == doctest::Approx(0.6 / 1.0).epsilon(1e-12));
  CHECK(a.kappa_max == doctest::Approx(1.0 / 0.36).epsilon(1e-12));
  // Support quotient lives inside half the curvature band, and the discrete
  // extremes approach the band edges from inside (tangential pair limit).
  CHECK(a.M0 >= 0.5 * a.kappa_min - 1e-9);
  CHECK(a.M0 <= 0.5 * a.kappa_min * 1.05);
  CHECK(a.M1 <= 0.5 * a.kappa_max + 1e-9);
  CHECK(a.M1 >= 0.5 * a.kappa_max * 0.95);
  CHECK(a.chart_sandwich_slack < 1e-9);
}

TEST_CASE("cavity node pairs satisfy the outward-normal convexity inequality") {
  Mat3 R = Eigen::AngleAxisd(30.0 * pi / 180.0, Vec3(1, 1, 0).normalized()).toRotationMatrix();
  SurfaceSpec e = make_ellipsoid(Vec3(0.3, -0.2, 0.1), Vec3(1.0, 0.6, 0.8), R);
  DiscretizedSurface d = discretize(e, 2);
  double worst = -1e30;
  for (int i = 0; i < d.size(); ++i) {
    Vec3 xi = d.points.row(i), nu = d.normals.row(i);
    for (int j = 0; j < d.size(); ++j) {
      if (i == j) continue;
      Vec3 zeta = d.points.row(j);
      worst = std::max(worst, nu.dot(zeta - xi));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("rigid motions transport nodes, normals and weights exactly") {
  SurfaceSpec e = make_ellipsoid(Vec3(0.2, 0.0, 0.1), Vec3(1.0, 0.6, 0.8));
  Mat3 R = Eigen::AngleAxisd(1.1, Vec3(0.3, -1, 0.2).normalized()).toRotationMatrix();
  Vec3 t(0.5, -2.0, 1.0);
  DiscretizedSurface d0 = discretize(e, 2);
  DiscretizedSurface d1 = discretize(transformed(e, R, t), 2);
  REQUIRE(d0.size() == d1.size());
  for (int i = 0; i < d0.size(); ++i) {
    Vec3 px = R * Vec3(d0.points.row(i)) + t;
    Vec3 pn = R * Vec3(d0.normals.row(i));
    CHECK((px - Vec3(d1.points.row(i))).norm() < 1e-12);
    CHECK((pn - Vec3(d1.normals.row(i))).norm() < 1e-12);
    CHECK(d0.weights[i] == doctest::Approx(d1.weights[i]).epsilon(1e-12));
  }
}

TEST_CASE("nearest boundary point: spheres are exact, ellipsoids stationary") {
  SurfaceSpec s = make_sphere(Vec3(1, 2, 3), 2.0);
  CHECK((s.nearest_boundary_point(Vec3(1, 2, 3)) - Vec3(1, 2, 3)).norm() ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK((s.nearest_boundary_point(Vec3(5, 2, 3)) - Vec3(3, 2, 3)).norm() < 1e-14);
  CHECK((s.nearest_boundary_point(Vec3(1.5, 2, 3)) - Vec3(3, 2, 3)).norm() < 1e-14);

  SurfaceSpec e = make_ellipsoid(Vec3::Zero(), Vec3(2.0, 1.0, 1.0));
  CHECK((e.nearest_boundary_point(Vec3(3, 0, 0)) - Vec3(2, 0, 0)).norm() < 1e-9);
  CHECK((e.nearest_boundary_point(Vec3(0, 2, 0)) - Vec3(0, 1, 0)).norm() < 1e-9);
  // Generic exterior point: foot lies on the surface and the offset is normal.
  for (const Vec3& x : {Vec3(2.5, 1.5, -0.7), Vec3(0.4, 0.2, 0.1), Vec3(-1.9, 0.4, 0.9)}) {
    Vec3 nb = e.nearest_boundary_point(x);
    CHECK(e.implicit(nb) == doctest::Approx(1.0).epsilon(1e-10));
    Vec3 off = x - nb;
    if (off.norm() > 1e-12) {
      Vec3 nu = e.outward_normal(nb);
      CHECK(std::abs(std::abs(off.normalized().dot(nu)) - 1.0) < 1e-9);
    }
  }
  // Signed distance: negative inside, positive outside.
  CHECK(e.signed_distance(Vec3(3, 0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.signed_distance(Vec3(1.99, 0, 0)) < 0);
}

TEST_CASE("surface separation for disjoint and nested spheres") {
  SurfaceSpec a = make_sphere(Vec3(1.2, 0, 0), 1.0);
  SurfaceSpec b = make_sphere(Vec3(-1.2, 0, 0), 1.0);
  CHECK(surface_separation(a, b) == doctest::Approx(0.4).epsilon(1e-10));
  SurfaceSpec outer = make_sphere(Vec3::Zero(), 2.0);
  SurfaceSpec inner = make_sphere(Vec3::Zero(), 0.5);
  CHECK(surface_separation(inner, outer) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("scene assembly: gaps, node bookkeeping, validation") {
  fixtures::Fixture fx = fixtures::make_fixture("two_spheres", 1);
  const geom::Scene& sc = fx.scene;
  CHECK(sc.n_cavities() == 2);
  CHECK(sc.half_min_cavity_gap() == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sc.min_gap_to_outer() == doctest::Approx(3.0 - 2.2).epsilon(1e-9));
  CHECK(sc.total_cavity_nodes == sc.cavities[0].size() + sc.cavities[1].size());
  CHECK(sc.cavity_offsets[1] == sc.cavities[0].size());
  CHECK(sc.rho_at(0) == doctest::Approx(1.5));
  CHECK(sc.cavity_of_node(sc.cavity_offsets[1]) == 1);
  CHECK_NOTHROW(validate_scene(sc));
}

TEST_CASE("scene validation rejects broken configurations") {
  FluxSpec flux;
  SurfaceSpec outer = make_sphere(Vec3::Zero(), 2.0);
  // Overlapping cavities.
  CHECK_THROWS_AS(validate_scene(build_scene(outer,
                                             {make_sphere(Vec3(0.3, 0, 0), 0.5),
                                              make_sphere(Vec3(-0.3, 0, 0), 0.5)},
                                             {1.0, 1.0}, flux, 1)),
                  AssumptionError);
  // Cavity pokes through the outer boundary.
  CHECK_THROWS_AS(
      validate_scene(build_scene(outer, {make_sphere(Vec3(1.8, 0, 0), 0.5)}, {1.0}, flux, 1)),
      AssumptionError);
  // Negative impedance coefficient.
  CHECK_THROWS_AS(
      validate_scene(build_scene(outer, {make_sphere(Vec3::Zero(), 0.5)}, {-1.0}, flux, 1)),
      UsageError);
  // Bad flux window.
  FluxSpec bad = flux;
  bad.T = 0.0;
  CHECK_THROWS_AS(
      validate_scene(build_scene(outer, {make_sphere(Vec3::Zero(), 0.5)}, {1.0}, bad, 1)),
      UsageError);
  // Mismatched rho count is caught at assembly time.
  CHECK_THROWS_AS(build_scene(outer, {make_sphere(Vec3::Zero(), 0.5)}, {1.0, 2.0}, flux, 1),
                  UsageError);
}
