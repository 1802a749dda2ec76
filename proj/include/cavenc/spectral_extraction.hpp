#pragma once

// Spectral-parameter grids, indicator sweeps, and length extraction.
//
// Grids live in one of three admissible regions of the right half plane:
//   real:   Im lambda = 0,
//   sector: Re lambda >= delta0 |Im lambda|   (edge profile: equality),
//   log:    |Im lambda| <= delta1 Re(lambda)/log Re(lambda), Re lambda >= e
//           (edge profile: equality).
// A sweep drives the forward solver across a grid; extraction fits
//   log|I0| = -l mu + a log(mu) + b,  mu = Re lambda,
// so the fitted l estimates the minimum broken-path length and the a log(mu)
// term absorbs the algebraic prefactor of the indicator asymptotics.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cavenc/forward_indicator.hpp"
#include "cavenc/geometry.hpp"

namespace cavenc::spectral {

enum class Region { Real, Sector, Log };
std::string region_name(Region r);
Region region_from_name(const std::string& s);

struct GridOptions {
  Region region = Region::Real;
  double mu_min = 8.0;
  double mu_max = 40.0;
  int count = 9;
  double delta0 = 0.5;
  double delta1 = 0.1;
};

/// Geometrically spaced mu values with the region's edge imaginary profile.
/// Throws UsageError on invalid ranges (count < 3, mu_min < e for log region).
std::vector<Complex> lambda_grid(const GridOptions& opt);

/// Membership test for the defining inequality of each region.
bool in_region(Complex lam, Region region, double delta0, double delta1);

struct SweepSample {
  Complex lambda;
  Complex I0;
  double route_rel_diff = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepOptions {
  bool with_route = true;    ///< also evaluate the kernel route per sample
  double noise = 0.0;        ///< relative multiplicative noise amplitude on I0
  std::uint64_t seed = 0;    ///< noise RNG seed (mt19937_64)
};

struct SweepResult {
  std::vector<SweepSample> samples;
  int n_failed = 0;
  bool all_failed() const { return n_failed == static_cast<int>(samples.size()); }
};

/// Evaluate the indicator over the grid.  Per-sample failures are recorded in
/// the sample (ok = false) rather than aborting; throws NumericalError only if
/// every sample failed.
SweepResult sweep(const geom::Scene& scene, const Vec3& p, const std::vector<Complex>& grid,
                  const SweepOptions& opt = {});

struct FitResult {
  double l_hat = 0.0;
  double a = 0.0;
  double b = 0.0;
  double stderr_l = 0.0;
  double residual = 0.0;  ///< RMS residual of the fit
  int n_used = 0;
};

/// Least-squares fit of log|I0| = -l mu + a log(mu) + b over the valid samples
/// (needs at least 4).  mu is Re lambda.
FitResult extract_length(const std::vector<SweepSample>& samples);

/// Same fit from raw (mu, |I0|) arrays.
FitResult fit_log_decay(const std::vector<double>& mu, const std::vector<double>& abs_i0);

/// Slope of log(y) against log(x) (least squares).
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Exponential decay rate: r such that y ~ C e^{-r mu} (least squares on log y).
double fit_exp_rate(const std::vector<double>& mu, const std::vector<double>& y);

/// CSV of a sweep: header + one row per valid sample with columns
/// mu, im_lambda, re_I0, im_I0, log_abs_I0, route_residual.
std::string sweep_csv(const SweepResult& r);

/// Structured extraction record: {p, l_hat, stderr, region, mu_range,
/// oracle_value, rel_error}.  oracle < 0 means "no oracle available".
std::string extraction_json(const Vec3& p, const FitResult& fit, Region region, double mu_min,
                            double mu_max, double oracle);

struct ConvergenceRow {
  int refinement;
  double mu_max;
  double l_hat;
  double rel_error;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool mesh_improves = false;     ///< error decreases with refinement at fixed mu range
  bool mu_range_improves = false; ///< error decreases as mu_max grows at fixed mesh
};

/// Sweep + fit over a ladder of refinements and mu ceilings against a known
/// oracle length.  scene_at builds the scene at a given refinement.
ConvergenceReport convergence_report(const std::function<geom::Scene(int)>& scene_at,
                                     const Vec3& p, double l_oracle,
                                     const std::vector<int>& refinements,
                                     const std::vector<double>& mu_maxes, double mu_min,
                                     int count);

}  // namespace cavenc::spectral
