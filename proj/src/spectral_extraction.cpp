#include "cavenc/spectral_extraction.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace cavenc::spectral {

std::string region_name(Region r) {
  switch (r) {
    case Region::Real: return "real";
    case Region::Sector: return "sector";
    case Region::Log: return "log";
  }
  return "?";
}

Region region_from_name(const std::string& s) {
  if (s == "real") return Region::Real;
  if (s == "sector") return Region::Sector;
  if (s == "log") return Region::Log;
  throw UsageError("unknown region '" + s + "' (expected real, sector, or log)");
}

std::vector<Complex> lambda_grid(const GridOptions& opt) {
  if (opt.count < 3) throw UsageError("lambda grid needs at least 3 points");
  if (!(opt.mu_min > 0) || !(opt.mu_max > opt.mu_min))
    throw UsageError("lambda grid needs 0 < mu_min < mu_max");
  if (opt.region == Region::Log && opt.mu_min < std::exp(1.0))
    throw UsageError("log-region grid needs mu_min >= e");
  if (opt.region == Region::Sector && !(opt.delta0 > 0 && opt.delta0 < 1))
    throw UsageError("sector grid needs 0 < delta0 < 1");
  std::vector<Complex> grid;
  double ratio = opt.mu_max / opt.mu_min;
  for (int k = 0; k < opt.count; ++k) {
    double mu = opt.mu_min * std::pow(ratio, static_cast<double>(k) / (opt.count - 1));
    double im = 0.0;
    if (opt.region == Region::Sector) im = mu / opt.delta0;       // Re = delta0 |Im| edge
    if (opt.region == Region::Log) im = opt.delta1 * mu / std::log(mu);
    grid.emplace_back(mu, im);
  }
  return grid;
}

bool in_region(Complex lam, Region region, double delta0, double delta1) {
  double mu = lam.real(), nu = std::abs(lam.imag());
  switch (region) {
    case Region::Real: return mu > 0 && lam.imag() == 0.0;
    case Region::Sector: return mu >= delta0 * nu - 1e-12 * mu;
    case Region::Log:
      return mu >= std::exp(1.0) - 1e-12 && nu <= delta1 * mu / std::log(mu) + 1e-12 * mu;
  }
  return false;
}

namespace {

// Deterministic standard normal from raw mt19937_64 output (Box-Muller on
// explicitly constructed uniforms, so results do not depend on the standard
// library's distribution implementations).
double draw_normal(std::mt19937_64& rng) {
  double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

}  // namespace

SweepResult sweep(const geom::Scene& scene, const Vec3& p, const std::vector<Complex>& grid,
                  const SweepOptions& opt) {
  if (grid.empty()) throw UsageError("sweep needs a nonempty lambda grid");
  SweepResult out;
  std::mt19937_64 rng(opt.seed);
  for (Complex lam : grid) {
    SweepSample s;
    s.lambda = lam;
    // Consume one draw per sample regardless of outcome so the noise pattern
    // depends only on (seed, sample index).
    double z = opt.noise > 0 ? draw_normal(rng) : 0.0;
    try {
      if (opt.with_route) {
        auto r = fwd::run_indicator(scene, lam, p);
        s.I0 = r.I0_direct;
        s.route_rel_diff = r.route_rel_diff;
      } else if (lam.imag() == 0.0) {
        double rl = lam.real();
        auto d = fwd::solve_densities<double>(scene, rl);
        auto w0 = fwd::w0_on_cavities<double>(scene, rl, d);
        s.I0 = Complex(fwd::indicator_direct<double>(scene, rl, p, d, w0), 0.0);
      } else {
        auto d = fwd::solve_densities<Complex>(scene, lam);
        auto w0 = fwd::w0_on_cavities<Complex>(scene, lam, d);
        s.I0 = fwd::indicator_direct<Complex>(scene, lam, p, d, w0);
      }
      if (opt.noise > 0) s.I0 *= (1.0 + opt.noise * z);
      s.ok = true;
    } catch (const std::exception& e) {
      s.ok = false;
      s.error = e.what();
      ++out.n_failed;
    }
    out.samples.push_back(std::move(s));
  }
  if (out.all_failed()) throw NumericalError("sweep failed at every grid sample");
  return out;
}

namespace {

FitResult fit_model(const std::vector<double>& mu, const std::vector<double>& logy) {
  const int n = static_cast<int>(mu.size());
  if (n < 4) throw UsageError("length extraction needs at least 4 valid samples");
  MatXd X(n, 3);
  VecXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = -mu[i];
    X(i, 1) = std::log(mu[i]);
    X(i, 2) = 1.0;
    y[i] = logy[i];
  }
  VecXd theta = X.colPivHouseholderQr().solve(y);
  VecXd res = y - X * theta;
  double rss = res.squaredNorm();
  double s2 = rss / std::max(1, n - 3);
  Mat3 xtx_inv = (X.transpose() * X).inverse();
  FitResult out;
  out.l_hat = theta[0];
  out.a = theta[1];
  out.b = theta[2];
  out.stderr_l = std::sqrt(std::max(0.0, s2 * xtx_inv(0, 0)));
  out.residual = std::sqrt(rss / n);
  out.n_used = n;
  return out;
}

}  // namespace

FitResult extract_length(const std::vector<SweepSample>& samples) {
  std::vector<double> mu, logy;
  for (const auto& s : samples) {
    if (!s.ok) continue;
    double a = std::abs(s.I0);
    if (!(a > 0.0) || !std::isfinite(a)) continue;
    mu.push_back(s.lambda.real());
    logy.push_back(std::log(a));
  }
  return fit_model(mu, logy);
}

FitResult fit_log_decay(const std::vector<double>& mu, const std::vector<double>& abs_i0) {
  std::vector<double> m, logy;
  for (size_t i = 0; i < mu.size(); ++i) {
    if (!(abs_i0[i] > 0.0) || !std::isfinite(abs_i0[i])) continue;
    m.push_back(mu[i]);
    logy.push_back(std::log(abs_i0[i]));
  }
  return fit_model(m, logy);
}

namespace {
double line_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw UsageError("slope fit needs at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return line_slope(lx, ly);
}

double fit_exp_rate(const std::vector<double>& mu, const std::vector<double>& y) {
  std::vector<double> m, ly;
  for (size_t i = 0; i < mu.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    m.push_back(mu[i]);
    ly.push_back(std::log(y[i]));
  }
  return -line_slope(m, ly);
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "mu,im_lambda,re_I0,im_I0,log_abs_I0,route_residual\n";
  for (const auto& s : r.samples) {
    if (!s.ok) continue;
    double a = std::abs(s.I0);
    os << fmt_full(s.lambda.real()) << ',' << fmt_full(s.lambda.imag()) << ','
       << fmt_full(s.I0.real()) << ',' << fmt_full(s.I0.imag()) << ','
       << fmt_full(a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity()) << ','
       << fmt_full(s.route_rel_diff) << '\n';
  }
  return os.str();
}

std::string extraction_json(const Vec3& p, const FitResult& fit, Region region, double mu_min,
                            double mu_max, double oracle) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"p\": [" << fmt_full(p[0]) << ", " << fmt_full(p[1]) << ", " << fmt_full(p[2])
     << "],\n";
  os << "  \"l_hat\": " << fmt_full(fit.l_hat) << ",\n";
  os << "  \"stderr\": " << fmt_full(fit.stderr_l) << ",\n";
  os << "  \"fit_a\": " << fmt_full(fit.a) << ",\n";
  os << "  \"fit_b\": " << fmt_full(fit.b) << ",\n";
  os << "  \"residual\": " << fmt_full(fit.residual) << ",\n";
  os << "  \"n_used\": " << fit.n_used << ",\n";
  os << "  \"region\": \"" << region_name(region) << "\",\n";
  os << "  \"mu_range\": [" << fmt_full(mu_min) << ", " << fmt_full(mu_max) << "],\n";
  if (oracle >= 0.0) {
    os << "  \"oracle_value\": " << fmt_full(oracle) << ",\n";
    os << "  \"rel_error\": " << fmt_full(std::abs(fit.l_hat - oracle) / oracle) << "\n";
  } else {
    os << "  \"oracle_value\": null,\n";
    os << "  \"rel_error\": null\n";
  }
  os << "}\n";
  return os.str();
}

ConvergenceReport convergence_report(const std::function<geom::Scene(int)>& scene_at,
                                     const Vec3& p, double l_oracle,
                                     const std::vector<int>& refinements,
                                     const std::vector<double>& mu_maxes, double mu_min,
                                     int count) {
  if (refinements.size() < 2) throw UsageError("convergence report needs >= 2 refinements");
  ConvergenceReport rep;
  SweepOptions sopt;
  sopt.with_route = false;
  for (int r : refinements) {
    geom::Scene scene = scene_at(r);
    for (double mm : mu_maxes) {
      GridOptions gopt;
      gopt.mu_min = mu_min;
      gopt.mu_max = mm;
      gopt.count = count;
      auto res = sweep(scene, p, lambda_grid(gopt), sopt);
      FitResult fit = extract_length(res.samples);
      rep.rows.push_back({r, mm, fit.l_hat, std::abs(fit.l_hat - l_oracle) / l_oracle});
    }
  }
  // Error shrinks with mesh refinement at the largest mu ceiling.
  const int nm = static_cast<int>(mu_maxes.size());
  double first_ref_err = rep.rows[nm - 1].rel_error;
  double last_ref_err = rep.rows[rep.rows.size() - 1].rel_error;
  rep.mesh_improves = last_ref_err <= first_ref_err + 1e-12;
  // Error shrinks as the mu ceiling grows on the finest mesh.
  size_t base = rep.rows.size() - nm;
  rep.mu_range_improves = rep.rows[rep.rows.size() - 1].rel_error <=
                          rep.rows[base].rel_error + 1e-12;
  return rep;
}

}  // namespace cavenc::spectral
