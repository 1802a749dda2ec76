#pragma once
// Strictly convex quadric surfaces (spheres / rotated ellipsoids), their
// product quadrature grids, exact local graph charts, convexity audits and
// scene assembly.

#include <optional>
#include <string>
#include <vector>

#include "cavenc/common.hpp"

namespace cavenc::geom {

/// Analytic description of one closed strictly convex surface.
struct SurfaceSpec {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Ones();
  Mat3 rotation = Mat3::Identity();  ///< columns = body axes in world frame

  /// Quadric matrix Q with surface { x : (x-c)^T Q (x-c) = 1 }.
  Mat3 quadric() const;
  /// (x-c)^T Q (x-c); <1 inside, >1 outside.
  double implicit(const Vec3& x) const;
  /// World point at colatitude-cosine u in [-1,1] and azimuth phi.
  Vec3 point_uphi(double u, double phi) const;
  /// Exact outward unit normal at a surface point.
  Vec3 outward_normal(const Vec3& x) const;
  /// Closest point on the surface to an arbitrary x (inside or outside).
  Vec3 nearest_boundary_point(const Vec3& x) const;
  /// Signed distance to the surface: negative inside, positive outside.
  double signed_distance(const Vec3& x) const;

  bool is_sphere(double tol = 1e-14) const;
  double curvature_min() const;  ///< smallest principal curvature anywhere
  double curvature_max() const;  ///< largest principal curvature anywhere
  double diameter() const { return 2.0 * semi_axes.maxCoeff(); }
  double min_curvature_radius() const { return 1.0 / curvature_max(); }
};

SurfaceSpec make_sphere(const Vec3& center, double radius);
SurfaceSpec make_ellipsoid(const Vec3& center, const Vec3& semi_axes,
                           const Mat3& rotation = Mat3::Identity());
/// Apply the rigid motion x -> R x + t to a surface.
SurfaceSpec transformed(const SurfaceSpec& s, const Mat3& R, const Vec3& t);

/// Product quadrature grid on a surface: Gauss-Legendre in u = cos(theta)
/// crossed with the periodic trapezoid rule in phi.  Refinement r uses
/// n_theta = 4*2^r Gauss nodes and n_phi = 2*n_theta azimuthal nodes.
struct DiscretizedSurface {
  SurfaceSpec spec;
  int refinement = 0;
  int n_theta = 0, n_phi = 0;
  MatXd points;   ///< N x 3 node positions
  MatXd normals;  ///< N x 3 exact outward unit normals
  VecXd weights;  ///< N surface-measure weights, sum == area

  int size() const { return static_cast<int>(weights.size()); }
  double area() const { return weights.sum(); }
  /// Representative local spacing near node i (sqrt of its weight).
  double local_spacing(int i) const { return std::sqrt(weights[i]); }
  double max_spacing() const { return std::sqrt(weights.maxCoeff()); }
};

DiscretizedSurface discretize(const SurfaceSpec& spec, int refinement);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, VecXd& nodes, VecXd& weights);

/// Exact tangent-plane graph chart at a base point: the surface near base is
///   X(sigma) = base + sigma1*e1 + sigma2*e2 - g(sigma)*nu,
/// with g >= 0 convex, g(0) = 0, grad g(0) = 0.  All quantities are evaluated
/// from the quadric in closed form (no interpolation).
struct LocalChart {
  Vec3 base, e1, e2, nu;
  Mat3 Q;          ///< quadric matrix of the parent surface
  Vec3 center;     ///< quadric center
  double radius;   ///< validity radius for |sigma|

  double g(const Vec2& sigma) const;
  Vec3 point(const Vec2& sigma) const;
  Vec2 grad_g(const Vec2& sigma) const;
  Mat2 hess_g(const Vec2& sigma) const;
  /// Exact outward unit normal of the surface at X(sigma).
  Vec3 surface_normal(const Vec2& sigma) const;
  /// Surface measure factor sqrt(1 + |grad g|^2) for dS = J dsigma.
  double jacobian(const Vec2& sigma) const;
};

LocalChart local_chart(const SurfaceSpec& spec, const Vec3& base_point);

/// Quantitative strict-convexity audit of one surface.  The support quotient
///   q(xi, zeta) = -nu_xi . (zeta - xi) / |zeta - xi|^2
/// is scanned over all node pairs of a discretization; for a strictly convex
/// surface it is pinched between positive constants M0 <= q <= M1, with
/// M0 -> kappa_min/2 and M1 -> kappa_max/2 as the pair gets tangentially close.
struct ConvexityAudit {
  double M0 = 0, M1 = 0;          ///< min / max of the support quotient
  double kappa_min = 0, kappa_max = 0;
  bool strictly_convex = false;
  /// Worst relative violation of M0*|s|^2 <= g(s) <= M1*(|s|^2 + g^2) over
  /// sampled charts (negative or ~0 when the sandwich holds).
  double chart_sandwich_slack = 0;
};

ConvexityAudit convexity_audit(const SurfaceSpec& spec, int refinement = 3);

/// Minimum Euclidean distance between two disjoint convex surfaces
/// (alternating nearest-point projections; exact for quadrics).
double surface_separation(const SurfaceSpec& a, const SurfaceSpec& b);

/// Time-transformed heat-flux model applied on the outer boundary.
struct FluxSpec {
  std::string kind = "constant";  ///< "constant" | "linear"
  double value = 1.0;             ///< constant case: f(t) = value
  double f0 = 1.0, slope = 0.0;   ///< linear case: f(t) = f0 + slope*t
  double T = 1.0;                 ///< observation window length
};

/// A complete measurement scene: outer boundary, strictly convex cavities
/// with their surface-impedance coefficients, flux model, discretization.
struct Scene {
  SurfaceSpec outer_spec;
  std::vector<SurfaceSpec> cavity_specs;
  std::vector<double> rho;  ///< impedance coefficient per cavity, >= 0
  FluxSpec flux;
  int refinement = 2;

  DiscretizedSurface outer;
  std::vector<DiscretizedSurface> cavities;
  std::vector<int> cavity_offsets;  ///< prefix offsets into the stacked cavity nodes
  int total_cavity_nodes = 0;

  int n_cavities() const { return static_cast<int>(cavity_specs.size()); }
  /// Half the minimum pairwise distance between distinct cavities
  /// (+infinity for a single cavity).
  double half_min_cavity_gap() const;
  /// Minimum distance from any cavity to the outer boundary.
  double min_gap_to_outer() const;
  /// rho value at stacked cavity node index.
  double rho_at(int stacked_index) const;
  int cavity_of_node(int stacked_index) const;
};

Scene build_scene(const SurfaceSpec& outer, std::vector<SurfaceSpec> cavities,
                  std::vector<double> rho, const FluxSpec& flux, int refinement);

/// Throws AssumptionError / UsageError when the scene violates the geometric
/// hypotheses (cavities not strictly inside, overlapping, non-convex, bad rho).
void validate_scene(const Scene& scene);

}  // namespace cavenc::geom
