#include "cavenc/path_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavenc::path {

using geom::DiscretizedSurface;
using geom::LocalChart;
using geom::Scene;
using geom::SurfaceSpec;

const char* to_string(MinClass c) {
  switch (c) {
    case MinClass::M1: return "M1";
    case MinClass::M2plus: return "M2plus";
    case MinClass::M2minus: return "M2minus";
    case MinClass::Mg: return "Mg";
  }
  return "?";
}

double broken_path_length(const Vec3& p, const Vec3& xi, const Vec3& y) {
  return (p - xi).norm() + (xi - y).norm();
}

double positivity_factor(const Vec3& p, const Vec3& xi, const Vec3& nu_xi, const Vec3& y) {
  Vec3 a = p - xi, b = y - xi;
  return nu_xi.dot(a.normalized() + b.normalized()) / (a.norm() * b.norm());
}

MinClass classify(const Vec3& p, const Vec3& xi, const Vec3& nu_xi, const Vec3& y,
                  double grazing_tol) {
  Vec3 a = p - xi;
  double sp = nu_xi.dot(a);
  if (std::abs(sp) <= grazing_tol * a.norm()) return MinClass::Mg;
  if (sp < 0) return MinClass::M2minus;
  return nu_xi.dot(y - xi) > 0 ? MinClass::M1 : MinClass::M2plus;
}

double brute_force_min(const Scene& scene, const Vec3& p, int refinement) {
  DiscretizedSurface outer = geom::discretize(scene.outer_spec, refinement);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cs : scene.cavity_specs) {
    DiscretizedSurface cav = geom::discretize(cs, refinement);
    for (int i = 0; i < cav.size(); ++i) {
      Vec3 xi = cav.points.row(i);
      double leg = (p - xi).norm();
      for (int j = 0; j < outer.size(); ++j) {
        double f = leg + (xi - Vec3(outer.points.row(j))).norm();
        best = std::min(best, f);
      }
    }
  }
  return best;
}

namespace {

// For fixed cavity point xi the boundary leg is minimized by the nearest
// point of the outer surface, so the search reduces to two chart variables:
//   F(xi) = |p - xi| + dist(xi, outer surface).
struct Reduced {
  const SurfaceSpec* outer;
  Vec3 p;

  double value(const Vec3& xi, Vec3* ynear = nullptr) const {
    Vec3 y = outer->nearest_boundary_point(xi);
    if (ynear) *ynear = y;
    return (p - xi).norm() + (xi - y).norm();
  }
  // Tangential gradient in a chart frame: F's ambient gradient is the sum of
  // the two unit leg directions pointing away from p and away from y.
  Vec2 grad(const LocalChart& c, const Vec2& s) const {
    Vec3 x = c.point(s);
    Vec3 y = outer->nearest_boundary_point(x);
    Vec3 g3 = (x - p).normalized() + (x - y).normalized();
    Vec2 gg = c.grad_g(s);
    Vec3 t1 = c.e1 - gg[0] * c.nu, t2 = c.e2 - gg[1] * c.nu;
    return Vec2(t1.dot(g3), t2.dot(g3));
  }
  Mat2 hess_fd(const LocalChart& c, const Vec2& s, double h) const {
    Mat2 H;
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e[j] = h;
      Vec2 gp = grad(c, s + e), gm = grad(c, s - e);
      H.col(j) = (gp - gm) / (2 * h);
    }
    return 0.5 * (H + H.transpose());
  }
};

struct RefineResult {
  Vec3 xi, y;
  double f;
  double grad_norm;
  Vec2 eigs;
  bool converged;
};

RefineResult newton_refine(const SurfaceSpec& cavity, const Reduced& red, Vec3 xi0) {
  Vec3 xi = cavity.nearest_boundary_point(xi0);
  double f = red.value(xi);
  double tau = 0.0;
  double gnorm = 0;
  LocalChart chart = geom::local_chart(cavity, xi);
  for (int it = 0; it < 80; ++it) {
    chart = geom::local_chart(cavity, xi);
    Vec2 g = red.grad(chart, Vec2::Zero());
    gnorm = g.norm();
    if (gnorm < 1e-13 * (1.0 + f)) break;
    Mat2 H = red.hess_fd(chart, Vec2::Zero(), 1e-5 * chart.radius);
    bool stepped = false;
    for (int bt = 0; bt < 10 && !stepped; ++bt) {
      Mat2 Ht = H + tau * Mat2::Identity();
      Eigen::SelfAdjointEigenSolver<Mat2> es(Ht);
      if (es.eigenvalues().minCoeff() <= 0) {
        tau = std::max(4 * tau, 1e-3 * std::abs(H.trace()) + 1e-12);
        continue;
      }
      Vec2 step = -Ht.ldlt().solve(g);
      double maxstep = 0.3 * chart.radius;
      if (step.norm() > maxstep) step *= maxstep / step.norm();
      Vec3 xin = chart.point(step);
      double fn = red.value(xin);
      if (fn <= f + 1e-15 * std::abs(f)) {
        xi = xin;
        f = fn;
        tau *= 0.25;
        stepped = true;
      } else {
        tau = std::max(4 * tau, 1e-6);
      }
    }
    if (!stepped) break;
  }
  RefineResult r;
  r.xi = xi;
  r.f = red.value(xi, &r.y);
  chart = geom::local_chart(cavity, xi);
  Vec2 g = red.grad(chart, Vec2::Zero());
  r.grad_norm = g.norm();
  Mat2 H = red.hess_fd(chart, Vec2::Zero(), 1e-5 * chart.radius);
  Eigen::SelfAdjointEigenSolver<Mat2> es(H);
  r.eigs = es.eigenvalues();
  r.converged = r.grad_norm < 1e-9 * (1.0 + r.f);
  return r;
}

}  // namespace

PathReport min_broken_path(const Scene& scene, const Vec3& p, const PathOptions& opts) {
  PathReport rep;
  double diam = scene.outer_spec.diameter();

  // Pass 1: node scan of the reduced functional on every cavity.
  struct Cand {
    Vec3 xi;
    int cavity;
    double f;
  };
  std::vector<Cand> cands;
  double best = std::numeric_limits<double>::infinity();
  double hmax = 0;
  for (int k = 0; k < scene.n_cavities(); ++k) {
    DiscretizedSurface cav = geom::discretize(scene.cavity_specs[k], opts.scan_refinement);
    hmax = std::max(hmax, cav.max_spacing());
    Reduced red{&scene.outer_spec, p};
    for (int i = 0; i < cav.size(); ++i) {
      Vec3 xi = cav.points.row(i);
      double f = red.value(xi);
      cands.push_back({xi, k, f});
      best = std::min(best, f);
    }
  }
  double band = opts.value_band * hmax;
  std::erase_if(cands, [&](const Cand& c) { return c.f > best + band; });
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.f < b.f; });
  if (static_cast<int>(cands.size()) > opts.max_candidates) {
    // Keep a stratified subset so a whole ring of near-minimizers stays covered.
    std::vector<Cand> kept;
    size_t stride = cands.size() / opts.max_candidates + 1;
    for (size_t i = 0; i < cands.size(); i += stride) kept.push_back(cands[i]);
    cands = std::move(kept);
  }

  // Pass 2: Newton-refine every candidate on exact charts, dedupe by position.
  std::vector<Minimizer> mins;
  double refined_best = std::numeric_limits<double>::infinity();
  std::vector<RefineResult> results;
  std::vector<int> result_cavity;
  for (const auto& c : cands) {
    Reduced red{&scene.outer_spec, p};
    RefineResult r = newton_refine(scene.cavity_specs[c.cavity], red, c.xi);
    results.push_back(r);
    result_cavity.push_back(c.cavity);
    refined_best = std::min(refined_best, r.f);
  }
  rep.length = refined_best;

  int flat_count = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const RefineResult& r = results[i];
    if (r.f > refined_best * (1.0 + 1e-9) + 1e-13) continue;
    bool dup = false;
    for (const auto& m : mins)
      if ((m.xi - r.xi).norm() < opts.dedupe_tol * diam) {
        dup = true;
        break;
      }
    if (dup) continue;
    Minimizer m;
    m.xi = r.xi;
    m.y = r.y;
    m.cavity = result_cavity[i];
    m.length = r.f;
    Vec3 nu = scene.cavity_specs[m.cavity].outward_normal(r.xi);
    m.nu_dot_p = nu.dot(p - r.xi);
    m.nu_dot_y = nu.dot(r.y - r.xi);
    m.cls = classify(p, r.xi, nu, r.y);
    m.hplus = positivity_factor(p, r.xi, nu, r.y);
    m.grad_norm = r.grad_norm;
    m.hess_eigs = r.eigs;
    double scale = std::max(std::abs(r.eigs[1]), 1.0 / diam);
    m.nondegenerate = r.eigs[0] > 1e-5 * scale;
    if (!m.nondegenerate) ++flat_count;
    if (static_cast<int>(mins.size()) < opts.max_minimizers) mins.push_back(m);
  }
  rep.minimizers = std::move(mins);

  int distinct = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].f > refined_best * (1.0 + 1e-9) + 1e-13) continue;
    bool dup = false;
    for (size_t j = 0; j < i; ++j)
      if (results[j].f <= refined_best * (1.0 + 1e-9) + 1e-13 &&
          (results[j].xi - results[i].xi).norm() < opts.dedupe_tol * diam)
        dup = true;
    if (!dup) ++distinct;
  }
  rep.degenerate_family = flat_count > 0 || distinct >= 12;
  rep.positivity_route = true;
  for (const auto& m : rep.minimizers)
    if (m.cls == MinClass::Mg || m.cls == MinClass::M2minus) rep.positivity_route = false;
  rep.isolated_nondegenerate = !rep.degenerate_family && !rep.minimizers.empty();
  for (const auto& m : rep.minimizers)
    if (!m.nondegenerate) rep.isolated_nondegenerate = false;
  return rep;
}

bool AssumptionReport::all_ok() const {
  if (!scene_ok) return false;
  for (const auto& pr : probes) {
    if (!pr.probe_outside) return false;
    if (!pr.path.positivity_route || !pr.path.isolated_nondegenerate) return false;
  }
  return true;
}

AssumptionReport check_assumptions(const Scene& scene, const std::vector<Vec3>& probes,
                                   const PathOptions& opts) {
  AssumptionReport rep;
  try {
    geom::validate_scene(scene);
    rep.scene_ok = true;
  } catch (const std::exception& e) {
    rep.scene_ok = false;
    rep.scene_message = e.what();
  }
  for (const Vec3& p : probes) {
    ProbeAssumptions pa;
    pa.probe = p;
    pa.probe_outside = scene.outer_spec.implicit(p) > 1.0 &&
                       scene.outer_spec.signed_distance(p) > 1e-9;
    if (rep.scene_ok) pa.path = min_broken_path(scene, p, opts);
    rep.probes.push_back(std::move(pa));
  }
  return rep;
}

}  // namespace cavenc::path
