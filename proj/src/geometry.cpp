#include "cavenc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavenc::geom {

// ---------------------------------------------------------------------------
// SurfaceSpec
// ---------------------------------------------------------------------------

Mat3 SurfaceSpec::quadric() const {
  Vec3 inv2 = semi_axes.array().square().inverse();
  return rotation * inv2.asDiagonal() * rotation.transpose();
}

double SurfaceSpec::implicit(const Vec3& x) const {
  Vec3 d = x - center;
  return d.dot(quadric() * d);
}

Vec3 SurfaceSpec::point_uphi(double u, double phi) const {
  double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  Vec3 body(semi_axes[0] * s * std::cos(phi), semi_axes[1] * s * std::sin(phi),
            semi_axes[2] * u);
  return center + rotation * body;
}

Vec3 SurfaceSpec::outward_normal(const Vec3& x) const {
  Vec3 grad = quadric() * (x - center);
  return grad.normalized();
}

Vec3 SurfaceSpec::nearest_boundary_point(const Vec3& x) const {
  if (is_sphere()) {
    double r = semi_axes[0];
    Vec3 d = x - center;
    double n = d.norm();
    if (n < 1e-300) return center + Vec3(r, 0, 0);  // center: every direction ties
    return center + d * (r / n);
  }
  // Work in the body frame where the surface is sum_i y_i^2 / a_i^2 = 1.
  Vec3 a = semi_axes;
  Vec3 y = rotation.transpose() * (x - center);
  double scale = a.maxCoeff();
  // Nudge off symmetry planes that would make the Lagrange branch ambiguous.
  for (int i = 0; i < 3; ++i)
    if (std::abs(y[i]) < 1e-13 * scale) y[i] = 1e-12 * scale;

  // Nearest point has y_i* = y_i a_i^2 / (a_i^2 + t) with t the root of
  //   f(t) = sum_i y_i^2 a_i^2 / (a_i^2 + t)^2 - 1 = 0
  // on the branch t > -min_i a_i^2 (f strictly decreasing there).
  double amin2 = a.array().square().minCoeff();
  auto f = [&](double t) {
    double s = -1.0;
    for (int i = 0; i < 3; ++i) {
      double d = a[i] * a[i] + t;
      s += y[i] * y[i] * a[i] * a[i] / (d * d);
    }
    return s;
  };
  double lo = -amin2 * (1.0 - 1e-12), hi = std::max(scale * scale, y.norm() * scale);
  while (f(hi) > 0) hi *= 2.0;
  double t = (f(0.0) > 0) ? 0.5 * hi : 0.5 * (lo + 0.0);
  for (int it = 0; it < 100; ++it) {
    double ft = f(t);
    (ft > 0 ? lo : hi) = t;
    // Newton step; fall back to bisection when it leaves the bracket.
    double fp = 0;
    for (int i = 0; i < 3; ++i) {
      double d = a[i] * a[i] + t;
      fp += -2.0 * y[i] * y[i] * a[i] * a[i] / (d * d * d);
    }
    double tn = t - ft / fp;
    t = (std::isfinite(tn) && tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * (std::abs(t) + scale * scale)) break;
  }
  Vec3 yb;
  for (int i = 0; i < 3; ++i) yb[i] = y[i] * a[i] * a[i] / (a[i] * a[i] + t);
  return center + rotation * yb;
}

double SurfaceSpec::signed_distance(const Vec3& x) const {
  double d = (x - nearest_boundary_point(x)).norm();
  return implicit(x) < 1.0 ? -d : d;
}

bool SurfaceSpec::is_sphere(double tol) const {
  return std::abs(semi_axes[0] - semi_axes[1]) <= tol * semi_axes.maxCoeff() &&
         std::abs(semi_axes[0] - semi_axes[2]) <= tol * semi_axes.maxCoeff();
}

double SurfaceSpec::curvature_min() const {
  double smax = semi_axes.maxCoeff(), smin = semi_axes.minCoeff();
  return smin / (smax * smax);
}

double SurfaceSpec::curvature_max() const {
  double smax = semi_axes.maxCoeff(), smin = semi_axes.minCoeff();
  return smax / (smin * smin);
}

SurfaceSpec make_sphere(const Vec3& center, double radius) {
  SurfaceSpec s;
  s.center = center;
  s.semi_axes = Vec3::Constant(radius);
  return s;
}

SurfaceSpec make_ellipsoid(const Vec3& center, const Vec3& semi_axes, const Mat3& rotation) {
  SurfaceSpec s;
  s.center = center;
  s.semi_axes = semi_axes;
  s.rotation = rotation;
  return s;
}

SurfaceSpec transformed(const SurfaceSpec& s, const Mat3& R, const Vec3& t) {
  SurfaceSpec out = s;
  out.center = R * s.center + t;
  out.rotation = R * s.rotation;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

void gauss_legendre(int n, VecXd& nodes, VecXd& weights) {
  // Golub-Welsch: eigen-decompose the Jacobi matrix of the Legendre recurrence.
  MatXd J = MatXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatXd> es(J);
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double v = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v * v;
  }
}

DiscretizedSurface discretize(const SurfaceSpec& spec, int refinement) {
  if (refinement < 0 || refinement > 6)
    throw UsageError("refinement must be between 0 and 6");
  DiscretizedSurface d;
  d.spec = spec;
  d.refinement = refinement;
  d.n_theta = 4 << refinement;
  d.n_phi = 2 * d.n_theta;
  const int N = d.n_theta * d.n_phi;
  d.points.resize(N, 3);
  d.normals.resize(N, 3);
  d.weights.resize(N);

  VecXd u, wu;
  gauss_legendre(d.n_theta, u, wu);
  const double wphi = 2.0 * pi / d.n_phi;
  const Vec3& a = spec.semi_axes;

  int idx = 0;
  for (int i = 0; i < d.n_theta; ++i) {
    double s = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
    for (int j = 0; j < d.n_phi; ++j, ++idx) {
      double phi = wphi * j;
      double c = std::cos(phi), sn = std::sin(phi);
      Vec3 body(a[0] * s * c, a[1] * s * sn, a[2] * u[i]);
      Vec3 x = spec.center + spec.rotation * body;
      d.points.row(idx) = x.transpose();
      d.normals.row(idx) = spec.outward_normal(x).transpose();
      // Surface element in (u, phi): |X_u x X_phi| with
      // X(u,phi) = (a1 s cos, a2 s sin, a3 u), s = sqrt(1-u^2).
      Vec3 Xu(-a[0] * u[i] * c / s, -a[1] * u[i] * sn / s, a[2]);
      Vec3 Xphi(-a[0] * s * sn, a[1] * s * c, 0.0);
      d.weights[idx] = Xu.cross(Xphi).norm() * wu[i] * wphi;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// LocalChart
// ---------------------------------------------------------------------------

namespace {
// g solves alpha g^2 - 2 beta g + gamma = 0; the branch with g(0)=0 written in
// its cancellation-free form.
double chart_g(double alpha, double beta, double gamma) {
  double disc = beta * beta - alpha * gamma;
  if (disc <= 0 || beta <= 0)
    throw NumericalError("local chart queried outside its validity region");
  return gamma / (beta + std::sqrt(disc));
}
}  // namespace

double LocalChart::g(const Vec2& sigma) const {
  Vec3 d = base + sigma[0] * e1 + sigma[1] * e2 - center;
  double alpha = nu.dot(Q * nu);
  double beta = nu.dot(Q * d);
  double gamma = d.dot(Q * d) - 1.0;
  return chart_g(alpha, beta, gamma);
}

Vec3 LocalChart::point(const Vec2& sigma) const {
  return base + sigma[0] * e1 + sigma[1] * e2 - g(sigma) * nu;
}

Vec2 LocalChart::grad_g(const Vec2& sigma) const {
  Vec3 m = Q * (point(sigma) - center);
  double invd = 1.0 / nu.dot(m);
  return Vec2(e1.dot(m) * invd, e2.dot(m) * invd);
}

Mat2 LocalChart::hess_g(const Vec2& sigma) const {
  Vec3 X = point(sigma);
  Vec3 m = Q * (X - center);
  Vec2 gg = grad_g(sigma);
  double nm = nu.dot(m);
  Mat2 H;
  const Vec3 e[2] = {e1, e2};
  for (int j = 0; j < 2; ++j) {
    Vec3 tj = e[j] - gg[j] * nu;  // dX/dsigma_j
    Vec3 dm = Q * tj;
    for (int i = 0; i < 2; ++i)
      H(i, j) = (e[i].dot(dm) * nm - e[i].dot(m) * nu.dot(dm)) / (nm * nm);
  }
  return 0.5 * (H + H.transpose());
}

Vec3 LocalChart::surface_normal(const Vec2& sigma) const {
  return (Q * (point(sigma) - center)).normalized();
}

double LocalChart::jacobian(const Vec2& sigma) const {
  return std::sqrt(1.0 + grad_g(sigma).squaredNorm());
}

LocalChart local_chart(const SurfaceSpec& spec, const Vec3& base_point) {
  LocalChart c;
  c.base = base_point;
  c.Q = spec.quadric();
  c.center = spec.center;
  c.nu = spec.outward_normal(base_point);
  // Any orthonormal tangent frame; built deterministically from the smallest
  // normal component.
  int k = 0;
  c.nu.cwiseAbs().minCoeff(&k);
  c.e1 = c.nu.cross(Vec3::Unit(k)).normalized();
  c.e2 = c.nu.cross(c.e1);
  c.radius = 0.3 * spec.min_curvature_radius();
  return c;
}

// ---------------------------------------------------------------------------
// Convexity audit
// ---------------------------------------------------------------------------

ConvexityAudit convexity_audit(const SurfaceSpec& spec, int refinement) {
  DiscretizedSurface d = discretize(spec, refinement);
  const int N = d.size();
  ConvexityAudit a;
  a.kappa_min = spec.curvature_min();
  a.kappa_max = spec.curvature_max();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < N; ++i) {
    Vec3 xi = d.points.row(i), nui = d.normals.row(i);
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      Vec3 dz = Vec3(d.points.row(j)) - xi;
      double q = -nui.dot(dz) / dz.squaredNorm();
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  }
  a.M0 = lo;
  a.M1 = hi;
  a.strictly_convex = lo > 0;

  // Sandwich check M0 |s|^2 <= g(s) <= M1 (|s|^2 + g^2) on a few exact charts.
  double slack = -std::numeric_limits<double>::infinity();
  int stride = std::max(1, N / 13);
  for (int i = 0; i < N; i += stride) {
    LocalChart c = local_chart(spec, d.points.row(i));
    for (int dir = 0; dir < 8; ++dir) {
      double ang = 2.0 * pi * dir / 8.0;
      Vec2 e(std::cos(ang), std::sin(ang));
      for (double r : {0.25, 0.5, 1.0}) {
        Vec2 s = (r * c.radius) * e;
        double g = c.g(s);
        double lo_v = a.M0 * s.squaredNorm();
        double hi_v = a.M1 * (s.squaredNorm() + g * g);
        slack = std::max(slack, std::max(lo_v - g, g - hi_v) / s.squaredNorm());
      }
    }
  }
  a.chart_sandwich_slack = slack;
  return a;
}

// ---------------------------------------------------------------------------
// Separation
// ---------------------------------------------------------------------------

namespace {
// Alternating nearest-point projections between two quadric surfaces, seeded
// from a coarse node scan; converges to the locally (for convex disjoint or
// nested pairs: globally) closest pair.
double nearest_pair_distance(const SurfaceSpec& A, const SurfaceSpec& B) {
  DiscretizedSurface da = discretize(A, 2), db = discretize(B, 2);
  double best = std::numeric_limits<double>::infinity();
  Vec3 x = A.center;
  for (int i = 0; i < da.size(); ++i)
    for (int j = 0; j < db.size(); ++j) {
      double v = (da.points.row(i) - db.points.row(j)).squaredNorm();
      if (v < best) {
        best = v;
        x = da.points.row(i);
      }
    }
  double scale = A.diameter() + B.diameter();
  double prev = std::numeric_limits<double>::infinity();
  Vec3 y = B.nearest_boundary_point(x);
  for (int it = 0; it < 300; ++it) {
    x = A.nearest_boundary_point(y);
    y = B.nearest_boundary_point(x);
    double cur = (x - y).norm();
    if (std::abs(prev - cur) < 1e-15 * scale) break;
    prev = cur;
  }
  return (x - y).norm();
}
}  // namespace

double surface_separation(const SurfaceSpec& a, const SurfaceSpec& b) {
  return nearest_pair_distance(a, b);
}

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

double Scene::half_min_cavity_gap() const {
  if (n_cavities() < 2) return std::numeric_limits<double>::infinity();
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_cavities(); ++i)
    for (int j = i + 1; j < n_cavities(); ++j)
      m = std::min(m, surface_separation(cavity_specs[i], cavity_specs[j]));
  return 0.5 * m;
}

double Scene::min_gap_to_outer() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : cavity_specs) m = std::min(m, surface_separation(c, outer_spec));
  return m;
}

double Scene::rho_at(int stacked_index) const { return rho[cavity_of_node(stacked_index)]; }

int Scene::cavity_of_node(int stacked_index) const {
  for (int k = n_cavities() - 1; k >= 0; --k)
    if (stacked_index >= cavity_offsets[k]) return k;
  throw UsageError("stacked cavity node index out of range");
}

Scene build_scene(const SurfaceSpec& outer, std::vector<SurfaceSpec> cavities,
                  std::vector<double> rho, const FluxSpec& flux, int refinement) {
  if (rho.size() != cavities.size())
    throw UsageError("need exactly one impedance coefficient per cavity");
  Scene s;
  s.outer_spec = outer;
  s.cavity_specs = std::move(cavities);
  s.rho = std::move(rho);
  s.flux = flux;
  s.refinement = refinement;
  s.outer = discretize(outer, refinement);
  int off = 0;
  for (const auto& c : s.cavity_specs) {
    s.cavity_offsets.push_back(off);
    s.cavities.push_back(discretize(c, refinement));
    off += s.cavities.back().size();
  }
  s.total_cavity_nodes = off;
  return s;
}

void validate_scene(const Scene& scene) {
  if ((scene.outer_spec.semi_axes.array() <= 0).any())
    throw UsageError("outer surface semi-axes must be positive");
  if (scene.flux.kind != "constant" && scene.flux.kind != "linear")
    throw UsageError("flux kind must be 'constant' or 'linear'");
  if (scene.flux.T <= 0) throw UsageError("observation window T must be positive");
  if (scene.flux.kind == "constant" && scene.flux.value == 0.0)
    throw UsageError("constant flux must be nonzero");
  for (size_t k = 0; k < scene.cavity_specs.size(); ++k) {
    const auto& c = scene.cavity_specs[k];
    if ((c.semi_axes.array() <= 0).any())
      throw UsageError("cavity semi-axes must be positive");
    if (scene.rho[k] < 0)
      throw UsageError("impedance coefficients must be nonnegative");
    // Strictly inside the outer surface.
    DiscretizedSurface d = discretize(c, 2);
    for (int i = 0; i < d.size(); ++i)
      if (scene.outer_spec.implicit(d.points.row(i)) >= 1.0)
        throw AssumptionError("cavity " + std::to_string(k) +
                              " is not strictly inside the outer surface");
    if (surface_separation(c, scene.outer_spec) <= 1e-9)
      throw AssumptionError("cavity " + std::to_string(k) +
                            " touches the outer surface");
    ConvexityAudit a = convexity_audit(c, 2);
    if (!a.strictly_convex)
      throw AssumptionError("cavity " + std::to_string(k) + " is not strictly convex");
  }
  for (size_t i = 0; i < scene.cavity_specs.size(); ++i)
    for (size_t j = i + 1; j < scene.cavity_specs.size(); ++j) {
      DiscretizedSurface di = discretize(scene.cavity_specs[i], 2);
      for (int q = 0; q < di.size(); ++q)
        if (scene.cavity_specs[j].implicit(di.points.row(q)) <= 1.0)
          throw AssumptionError("cavities " + std::to_string(i) + " and " +
                                std::to_string(j) + " overlap");
      if (surface_separation(scene.cavity_specs[i], scene.cavity_specs[j]) <= 1e-9)
        throw AssumptionError("cavities " + std::to_string(i) + " and " +
                              std::to_string(j) + " touch");
    }
}

}  // namespace cavenc::geom
