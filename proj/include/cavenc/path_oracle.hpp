#pragma once
// Shortest broken transmission paths probe -> cavity -> outer boundary:
//   l(p) = min { |p - xi| + |xi - y| : xi on a cavity, y on the outer surface }.
// The indicator function of the reconstruction decays like exp(-lambda*l(p)),
// so this module is both the ground-truth oracle for synthetic scenes and the
// classifier that decides which decay estimates apply at a given probe.

#include <vector>

#include "cavenc/geometry.hpp"

namespace cavenc::path {

/// Contact classes of a minimizing pair (xi, y), by the sign of the cavity
/// normal against the two legs of the path:
///   M1      nu.(p-xi) > 0 and nu.(y-xi) > 0   (both legs leave the cavity
///           on its outward side; the strongest, sign-definite estimates hold)
///   M2plus  nu.(p-xi) > 0 and nu.(y-xi) < 0   (the boundary leg re-enters)
///   M2minus nu.(p-xi) < 0                      (back-side contact)
///   Mg      nu.(p-xi) = 0 within tolerance     (grazing contact)
enum class MinClass { M1, M2plus, M2minus, Mg };

const char* to_string(MinClass c);

/// One refined minimizing pair.
struct Minimizer {
  Vec3 xi = Vec3::Zero();       ///< cavity contact point
  Vec3 y = Vec3::Zero();        ///< outer boundary exit point
  int cavity = 0;               ///< index of the cavity carrying xi
  double length = 0;            ///< |p-xi| + |xi-y|
  MinClass cls = MinClass::M1;
  double nu_dot_p = 0;          ///< nu_xi . (p - xi)
  double nu_dot_y = 0;          ///< nu_xi . (y - xi)
  double hplus = 0;             ///< curvature-free positivity factor (see below)
  double grad_norm = 0;         ///< surface-tangential gradient at convergence
  Vec2 hess_eigs = Vec2::Zero();///< eigenvalues of the reduced 2x2 Hessian
  bool nondegenerate = false;   ///< both Hessian eigenvalues safely positive
};

/// Everything known about the minimizing set for one probe.
struct PathReport {
  double length = 0;                  ///< l(p)
  std::vector<Minimizer> minimizers;  ///< distinct global minimizers (capped)
  bool degenerate_family = false;     ///< flat direction / ring of minimizers
  bool positivity_route = false;      ///< no Mg or M2minus minimizer present
  bool isolated_nondegenerate = false;///< finitely many, all nondegenerate
};

struct PathOptions {
  int scan_refinement = 4;      ///< node grid for the global scan
  double value_band = 1.0;      ///< keep scan nodes with f <= best + band*h
  double dedupe_tol = 1e-4;     ///< relative position tolerance for merging
  int max_minimizers = 16;      ///< cap on reported minimizers
  int max_candidates = 200;     ///< cap on Newton starts
};

double broken_path_length(const Vec3& p, const Vec3& xi, const Vec3& y);

/// Positivity factor of a contact pair:
///   hplus = nu_xi . ( (p-xi)/|p-xi| + (y-xi)/|y-xi| ) / (|p-xi| |xi-y|);
/// strictly positive exactly on class M1.
double positivity_factor(const Vec3& p, const Vec3& xi, const Vec3& nu_xi, const Vec3& y);

MinClass classify(const Vec3& p, const Vec3& xi, const Vec3& nu_xi, const Vec3& y,
                  double grazing_tol = 1e-6);

/// Pure node-pair scan at the given refinement; the independent (slow, O(h^2)
/// accurate) oracle against which the refined solver is tested.
double brute_force_min(const geom::Scene& scene, const Vec3& p, int refinement);

/// Globally scan, then Newton-refine on exact surface charts.  Returns the
/// minimum length together with the deduplicated set of global minimizers,
/// their contact classes, and degeneracy diagnostics.
PathReport min_broken_path(const geom::Scene& scene, const Vec3& p,
                           const PathOptions& opts = {});

/// Probe-dependent hypothesis summary for the reconstruction estimates.
struct ProbeAssumptions {
  Vec3 probe = Vec3::Zero();
  bool probe_outside = false;  ///< p strictly outside the closed outer domain
  PathReport path;
};

struct AssumptionReport {
  bool scene_ok = false;  ///< validate_scene passed (convexity, disjointness...)
  std::string scene_message;
  std::vector<ProbeAssumptions> probes;
  bool all_ok() const;
};

AssumptionReport check_assumptions(const geom::Scene& scene,
                                   const std::vector<Vec3>& probes,
                                   const PathOptions& opts = {});

}  // namespace cavenc::path
