// cavenc: batch front-end for the cavity-enclosure toolkit.
//
// Subcommands: scene-validate, sweep, extract, audit, reconstruct, fixtures.
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 assumption
// violation.  All numeric output is fixed-format scientific with 17
// significant digits so that identical configurations produce byte-identical
// files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavenc/bie_core.hpp"
#include "cavenc/enclosure_recon.hpp"
#include "cavenc/fixtures.hpp"
#include "cavenc/forward_indicator.hpp"
#include "cavenc/geometry.hpp"
#include "cavenc/laplace_asymptotics.hpp"
#include "cavenc/path_oracle.hpp"
#include "cavenc/scene_io.hpp"
#include "cavenc/spectral_extraction.hpp"

namespace fs = std::filesystem;
using namespace cavenc;

namespace {

Vec3 parse_probe(const std::string& s) {
  double x, y, z;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
    throw UsageError("--probe expects x,y,z (got '" + s + "')");
  return Vec3(x, y, z);
}

std::vector<Vec3> parse_probes(const std::vector<std::string>& raw) {
  std::vector<Vec3> out;
  for (const auto& s : raw) out.push_back(parse_probe(s));
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

geom::Scene load_scene_with_refinement(const std::string& path, int refinement_override) {
  geom::Scene s = geom::load_scene(path);
  if (refinement_override > 0 && refinement_override != s.refinement)
    s = geom::build_scene(s.outer_spec, s.cavity_specs, s.rho, s.flux, refinement_override);
  return s;
}

struct GridFlags {
  double mu_min = 8.0, mu_max = 40.0;
  int count = 9;
  std::string region = "real";
  double delta0 = 0.5, delta1 = 0.1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu-min", mu_min, "smallest Re lambda in the grid");
    cmd->add_option("--mu-max", mu_max, "largest Re lambda in the grid");
    cmd->add_option("--count", count, "number of grid samples");
    cmd->add_option("--region", region, "lambda region: real, sector, or log")
        ->check(CLI::IsMember({"real", "sector", "log"}));
    cmd->add_option("--delta0", delta0, "sector aperture parameter (0 < delta0 < 1)");
    cmd->add_option("--delta1", delta1, "log-region width parameter");
  }

  spectral::GridOptions options() const {
    spectral::GridOptions g;
    g.region = spectral::region_from_name(region);
    g.mu_min = mu_min;
    g.mu_max = mu_max;
    g.count = count;
    g.delta0 = delta0;
    g.delta1 = delta1;
    return g;
  }
};

// ---------------------------------------------------------------------------

int cmd_scene_validate(const std::string& scene_path, const std::vector<std::string>& probes_raw,
                       int refinement) {
  geom::Scene scene = load_scene_with_refinement(scene_path, refinement);
  std::vector<Vec3> probes = parse_probes(probes_raw);
  path::AssumptionReport rep = path::check_assumptions(scene, probes);

  std::cout << "scene: " << scene_path << "\n";
  std::cout << "geometry_valid: " << (rep.scene_ok ? "true" : "false") << "\n";
  if (!rep.scene_ok) std::cout << "geometry_error: " << rep.scene_message << "\n";
  if (rep.scene_ok) {
    std::cout << "cavities: " << scene.n_cavities() << "\n";
    std::cout << "half_min_cavity_gap: " << fmt_full(scene.half_min_cavity_gap()) << "\n";
    std::cout << "min_gap_to_outer: " << fmt_full(scene.min_gap_to_outer()) << "\n";
    for (int k = 0; k < scene.n_cavities(); ++k) {
      geom::ConvexityAudit audit = geom::convexity_audit(scene.cavity_specs[k]);
      std::cout << "cavity " << k << ": strictly_convex="
                << (audit.strictly_convex ? "true" : "false")
                << " M0=" << fmt_full(audit.M0) << " M1=" << fmt_full(audit.M1)
                << " kappa=[" << fmt_full(audit.kappa_min) << ", " << fmt_full(audit.kappa_max)
                << "]\n";
    }
  }
  bool all_ok = rep.scene_ok;
  for (const auto& pa : rep.probes) {
    std::cout << "probe (" << fmt_full(pa.probe[0]) << ", " << fmt_full(pa.probe[1]) << ", "
              << fmt_full(pa.probe[2]) << "):\n";
    std::cout << "  outside_domain: " << (pa.probe_outside ? "true" : "false") << "\n";
    if (!pa.probe_outside) {
      all_ok = false;
      continue;
    }
    std::cout << "  l: " << fmt_full(pa.path.length) << "\n";
    std::cout << "  positivity_route: " << (pa.path.positivity_route ? "true" : "false")
              << "\n";
    std::cout << "  isolated_nondegenerate: "
              << (pa.path.isolated_nondegenerate ? "true" : "false") << "\n";
    std::cout << "  degenerate_family: " << (pa.path.degenerate_family ? "true" : "false")
              << "\n";
    for (const auto& m : pa.path.minimizers) {
      std::cout << "  minimizer: class=" << path::to_string(m.cls) << " cavity=" << m.cavity
                << " xi=(" << fmt_full(m.xi[0]) << ", " << fmt_full(m.xi[1]) << ", "
                << fmt_full(m.xi[2]) << ") y=(" << fmt_full(m.y[0]) << ", " << fmt_full(m.y[1])
                << ", " << fmt_full(m.y[2]) << ") length=" << fmt_full(m.length)
                << " hplus=" << fmt_full(m.hplus) << " grad=" << fmt_full(m.grad_norm) << "\n";
    }
    if (!pa.path.positivity_route) all_ok = false;
  }
  std::cout << "assumptions_ok: " << (all_ok ? "true" : "false") << "\n";
  if (!all_ok) throw AssumptionError("scene or probe assumptions violated (see report)");
  return 0;
}

int cmd_sweep(const std::string& scene_path, const std::vector<std::string>& probes_raw,
              const GridFlags& gf, const std::string& out_dir, int refinement, double noise,
              std::uint64_t seed, bool and_extract) {
  geom::Scene scene = load_scene_with_refinement(scene_path, refinement);
  std::vector<Vec3> probes = parse_probes(probes_raw);
  if (probes.empty()) throw UsageError("at least one --probe is required");
  std::vector<Complex> grid = spectral::lambda_grid(gf.options());

  spectral::SweepOptions sopt;
  sopt.with_route = true;
  sopt.noise = noise;
  sopt.seed = seed;

  bool any_failed = false;
  for (size_t i = 0; i < probes.size(); ++i) {
    const Vec3& p = probes[i];
    std::string tag = "p" + std::to_string(i);
    if (!(scene.outer_spec.implicit(p) > 1.0)) {
      std::cerr << "warning: probe " << i << " lies inside the domain; skipped\n";
      any_failed = true;
      continue;
    }
    spectral::SweepResult res = spectral::sweep(scene, p, grid, sopt);
    for (const auto& s : res.samples)
      if (!s.ok)
        std::cerr << "warning: sample at mu=" << fmt_full(s.lambda.real())
                  << " failed: " << s.error << "\n";
    write_file(fs::path(out_dir) / ("sweep_" + tag + ".csv"), spectral::sweep_csv(res));
    std::cout << "wrote " << (fs::path(out_dir) / ("sweep_" + tag + ".csv")).string() << " ("
              << (res.samples.size() - res.n_failed) << " samples, " << res.n_failed
              << " failed)\n";
    if (and_extract) {
      spectral::FitResult fit = spectral::extract_length(res.samples);
      double oracle = -1.0;
      if (scene.n_cavities() > 0) oracle = path::min_broken_path(scene, p).length;
      write_file(fs::path(out_dir) / ("extract_" + tag + ".json"),
                 spectral::extraction_json(p, fit, gf.options().region, gf.mu_min, gf.mu_max,
                                           oracle));
      std::cout << "wrote " << (fs::path(out_dir) / ("extract_" + tag + ".json")).string()
                << " l_hat=" << fmt_full(fit.l_hat) << " stderr=" << fmt_full(fit.stderr_l)
                << "\n";
      if (!(fit.l_hat > 0) || fit.n_used < 4) any_failed = true;
    }
    // Per-sample gaps alone are not fatal: the fit runs on the surviving rows.
  }
  if (and_extract && any_failed)
    throw NumericalError("one or more probes failed to produce a converged extraction");
  return 0;
}

int cmd_audit(const std::string& which, const std::string& scene_path,
              const std::vector<std::string>& probes_raw, const GridFlags& gf,
              const std::string& out_dir, int refinement) {
  bool pass = true;
  std::ostringstream summary;

  if (which == "kernels") {
    geom::Scene scene = load_scene_with_refinement(scene_path, refinement);
    std::vector<double> mus = {8, 16, 32, 64};
    std::vector<double> y22_norms, w_envs, m1_envs;
    std::vector<std::vector<double>> diag_norms(scene.n_cavities());
    for (double mu : mus) {
      MatXd ty22 = bie::assemble_ty22(scene, mu);
      MatXd y22 = bie::assemble_y22(scene, mu);
      y22_norms.push_back(bie::norm_inf(y22));
      if (scene.n_cavities() >= 2) {
        MatXd m_full = bie::resolvent(ty22);
        bie::BlockSplit<double> bs = bie::block_split<double>(scene, ty22, nullptr);
        MatXd m0 = bie::assemble_m0(scene, mu);
        MatXd m1 = m_full - m0;
        double we = 0, me = 0;
        for (int a = 0; a < scene.n_cavities(); ++a)
          for (int b = 0; b < scene.n_cavities(); ++b) {
            if (a == b) continue;
            we = std::max(we, bie::block_envelope(scene, bs.W, a, b));
            me = std::max(me, bie::block_envelope(scene, m1, a, b));
          }
        w_envs.push_back(we);
        m1_envs.push_back(me);
        for (int a = 0; a < scene.n_cavities(); ++a) {
          int off = scene.cavity_offsets[a], sz = scene.cavities[a].size();
          diag_norms[a].push_back(
              bie::norm_inf(MatXd(m_full.block(off, off, sz, sz) - bs.M_diag[a])));
        }
      }
    }
    double y22_slope = spectral::fit_log_slope(mus, y22_norms);
    summary << "y22_norm_slope: " << fmt_full(y22_slope) << " (target -1 +- 0.15)\n";
    if (std::abs(y22_slope + 1.0) > 0.15) pass = false;
    {
      std::ostringstream csv;
      csv << "mu,max_envelope,fitted_rate\n";
      for (size_t i = 0; i < mus.size(); ++i)
        csv << fmt_full(mus[i]) << ',' << fmt_full(y22_norms[i]) << ',' << fmt_full(y22_slope)
            << '\n';
      write_file(fs::path(out_dir) / "y22_decay.csv", csv.str());
    }
    if (scene.n_cavities() >= 2) {
      double d1 = scene.half_min_cavity_gap();
      double thr = 0.5 * 0.2 * d1;
      double w_rate = spectral::fit_exp_rate(mus, w_envs);
      double m1_rate = spectral::fit_exp_rate(mus, m1_envs);
      summary << "w_offdiag_rate: " << fmt_full(w_rate) << " (threshold " << fmt_full(thr)
              << ")\n";
      summary << "m1_offdiag_rate: " << fmt_full(m1_rate) << " (threshold " << fmt_full(thr)
              << ")\n";
      if (w_rate < thr || m1_rate < thr) pass = false;
      std::ostringstream csv;
      csv << "mu,max_envelope,fitted_rate\n";
      for (size_t i = 0; i < mus.size(); ++i)
        csv << fmt_full(mus[i]) << ',' << fmt_full(w_envs[i]) << ',' << fmt_full(w_rate)
            << '\n';
      write_file(fs::path(out_dir) / "w_offdiag_decay.csv", csv.str());
      std::ostringstream csv2;
      csv2 << "mu,max_envelope,fitted_rate\n";
      for (size_t i = 0; i < mus.size(); ++i)
        csv2 << fmt_full(mus[i]) << ',' << fmt_full(m1_envs[i]) << ',' << fmt_full(m1_rate)
             << '\n';
      write_file(fs::path(out_dir) / "m1_offdiag_decay.csv", csv2.str());
      std::ostringstream csv3;
      csv3 << "mu";
      for (int a = 0; a < scene.n_cavities(); ++a) csv3 << ",diag_perturbation_" << a;
      csv3 << '\n';
      for (size_t i = 0; i < mus.size(); ++i) {
        csv3 << fmt_full(mus[i]);
        for (int a = 0; a < scene.n_cavities(); ++a) csv3 << ',' << fmt_full(diag_norms[a][i]);
        csv3 << '\n';
      }
      write_file(fs::path(out_dir) / "diag_perturbation.csv", csv3.str());
      bool diag_decreasing = true;
      for (int a = 0; a < scene.n_cavities(); ++a)
        for (size_t i = 1; i < mus.size(); ++i)
          if (!(diag_norms[a][i] < diag_norms[a][i - 1])) diag_decreasing = false;
      summary << "diag_perturbation_decreasing: " << (diag_decreasing ? "true" : "false")
              << "\n";
      if (!diag_decreasing) pass = false;
    }
  } else if (which == "laplace") {
    std::vector<double> mus = {8, 16, 32, 64};
    for (const auto& spec :
         {lap::gaussian_spec(), lap::aniso_quad_spec(), lap::anisotropic_spec()}) {
      std::vector<double> errs;
      std::ostringstream csv;
      csv << "mu,re_quadrature,im_quadrature,re_asymptotic,im_asymptotic,rel_error\n";
      for (double mu : mus) {
        Complex q = lap::quadrature_value(spec, Complex(mu, 0));
        Complex a = lap::nondegenerate_asymptotic(spec, Complex(mu, 0));
        double err = std::abs(q / a - 1.0);
        errs.push_back(err);
        csv << fmt_full(mu) << ',' << fmt_full(q.real()) << ',' << fmt_full(q.imag()) << ','
            << fmt_full(a.real()) << ',' << fmt_full(a.imag()) << ',' << fmt_full(err) << '\n';
      }
      write_file(fs::path(out_dir) / ("laplace_" + spec.name + ".csv"), csv.str());
      if (spec.name == "gaussian") {
        summary << "gaussian_rel_error_mu64: " << fmt_full(errs.back()) << " (<= 1e-6)\n";
        if (errs.back() > 1e-6) pass = false;
      } else if (spec.name == "anisotropic") {
        double slope = spectral::fit_log_slope(mus, errs);
        summary << "anisotropic_error_slope: " << fmt_full(slope) << " (<= -0.8)\n";
        if (slope > -0.8) pass = false;
      }
    }
    {
      spectral::GridOptions gopt = gf.options();
      gopt.region = spectral::Region::Log;
      gopt.mu_min = std::max(gf.mu_min, 20.0);
      gopt.mu_max = std::max(gopt.mu_min * 2, gf.mu_max);
      gopt.count = std::max(gf.count, 5);
      auto grid = spectral::lambda_grid(gopt);
      lap::DegenerateAudit audit = lap::degenerate_lower_bound_audit(lap::degenerate_spec(), grid);
      summary << "degenerate_min_level: " << fmt_full(audit.min_level) << "\n";
      summary << "degenerate_max_level: " << fmt_full(audit.max_level) << "\n";
      if (!audit.within_factor(2.0)) pass = false;
      std::ostringstream csv;
      csv << "mu,im_lambda,level\n";
      for (size_t i = 0; i < audit.lambdas.size(); ++i)
        csv << fmt_full(audit.lambdas[i].real()) << ',' << fmt_full(audit.lambdas[i].imag())
            << ',' << fmt_full(audit.levels[i]) << '\n';
      write_file(fs::path(out_dir) / "laplace_degenerate.csv", csv.str());
    }
  } else if (which == "densities") {
    geom::Scene scene = load_scene_with_refinement(scene_path, refinement);
    std::vector<double> mus = {8, 16, 32, 64};
    std::vector<double> devs;
    std::ostringstream csv;
    csv << "mu,phi_minus_g_max,fitted_slope\n";
    for (double mu : mus) {
      auto d = fwd::solve_densities<double>(scene, mu);
      double dev = 0;
      for (int i = 0; i < d.phi.size(); ++i) dev = std::max(dev, std::abs(d.phi[i] - d.g));
      devs.push_back(dev / std::abs(d.g));
    }
    double slope = spectral::fit_log_slope(mus, devs);
    for (size_t i = 0; i < mus.size(); ++i)
      csv << fmt_full(mus[i]) << ',' << fmt_full(devs[i]) << ',' << fmt_full(slope) << '\n';
    write_file(fs::path(out_dir) / "density_deviation.csv", csv.str());
    summary << "phi_minus_g_slope: " << fmt_full(slope) << " (<= -0.8)\n";
    if (slope > -0.8) pass = false;
  } else {
    throw UsageError("audit mode must be kernels, laplace, or densities");
  }

  summary << "audit_pass: " << (pass ? "true" : "false") << "\n";
  std::cout << summary.str();
  write_file(fs::path(out_dir) / ("audit_" + which + ".txt"), summary.str());
  if (!pass) throw NumericalError("audit thresholds not met (see report)");
  return 0;
}

int cmd_reconstruct(const std::string& scene_path, const std::vector<std::string>& probes_raw,
                    const GridFlags& gf, const std::string& out_dir, int refinement,
                    double margin, int resolution) {
  geom::Scene scene = load_scene_with_refinement(scene_path, refinement);
  std::vector<Vec3> probes = parse_probes(probes_raw);
  if (probes.empty()) throw UsageError("at least one --probe is required");
  std::vector<Complex> grid = spectral::lambda_grid(gf.options());

  spectral::SweepOptions sopt;
  sopt.with_route = false;
  std::vector<recon::ProbeLength> lengths;
  std::ostringstream lengths_csv;
  lengths_csv << "px,py,pz,l_hat,stderr\n";
  for (const Vec3& p : probes) {
    auto res = spectral::sweep(scene, p, grid, sopt);
    auto fit = spectral::extract_length(res.samples);
    lengths.push_back({p, fit.l_hat, fit.stderr_l});
    lengths_csv << fmt_full(p[0]) << ',' << fmt_full(p[1]) << ',' << fmt_full(p[2]) << ','
                << fmt_full(fit.l_hat) << ',' << fmt_full(fit.stderr_l) << '\n';
  }
  recon::ReconOptions ropt;
  ropt.margin = margin;
  ropt.resolution = resolution;
  recon::EnclosureGrid g = recon::enclose(scene.outer_spec, lengths, ropt);
  recon::SoundnessReport sound = recon::soundness_check(scene, g);

  write_file(fs::path(out_dir) / "lengths.csv", lengths_csv.str());
  write_file(fs::path(out_dir) / "enclosure.vtk", recon::vtk_structured_points(g));
  write_file(fs::path(out_dir) / "enclosure.csv", recon::grid_csv(g));
  write_file(fs::path(out_dir) / "enclosure.json", recon::enclosure_json(g, &sound));
  std::cout << "margin: " << fmt_full(g.margin_used) << "\n";
  std::cout << "retained: " << g.count(recon::VoxelState::Retained) << "\n";
  std::cout << "carved: " << g.count(recon::VoxelState::Carved) << "\n";
  std::cout << "soundness_violations: " << sound.violations << " / " << sound.n_samples
            << "\n";
  if (!sound.sound())
    throw NumericalError("soundness violations: true boundary samples in carved voxels");
  return 0;
}

int cmd_fixtures(const std::string& out_dir, int refinement) {
  for (const std::string& name : fixtures::fixture_names()) {
    fixtures::Fixture fx = fixtures::make_fixture(name, refinement > 0 ? refinement : 2);
    fs::path path = fs::path(out_dir) / (name + ".json");
    write_file(path, geom::scene_to_json(fx.scene));
    std::cout << "wrote " << path.string() << " (" << fx.notes << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity enclosure toolkit"};
  app.require_subcommand(1);

  std::string scene_path, out_dir = "out", audit_which;
  std::vector<std::string> probes_raw;
  int refinement = 0;  // 0: keep the scene file's value
  double margin = -1.0, noise = 0.0;
  int resolution = 64;
  std::uint64_t seed = 0;
  GridFlags gf;

  auto* v = app.add_subcommand("scene-validate", "check scene and probe assumptions");
  v->add_option("--scene", scene_path, "scene JSON file")->required();
  v->add_option("--probe", probes_raw, "probe point x,y,z (repeatable)");
  v->add_option("--refinement", refinement, "override mesh refinement");

  auto* sw = app.add_subcommand("sweep", "indicator sweep over a lambda grid");
  sw->add_option("--scene", scene_path, "scene JSON file")->required();
  sw->add_option("--probe", probes_raw, "probe point x,y,z (repeatable)")->required();
  sw->add_option("--out", out_dir, "output directory");
  sw->add_option("--refinement", refinement, "override mesh refinement");
  sw->add_option("--noise", noise, "relative noise amplitude on I0");
  sw->add_option("--seed", seed, "noise RNG seed");
  gf.attach(sw);

  auto* ex = app.add_subcommand("extract", "sweep + length extraction per probe");
  ex->add_option("--scene", scene_path, "scene JSON file")->required();
  ex->add_option("--probe", probes_raw, "probe point x,y,z (repeatable)")->required();
  ex->add_option("--out", out_dir, "output directory");
  ex->add_option("--refinement", refinement, "override mesh refinement");
  ex->add_option("--noise", noise, "relative noise amplitude on I0");
  ex->add_option("--seed", seed, "noise RNG seed");
  gf.attach(ex);

  auto* au = app.add_subcommand("audit", "numerical audits of the operator estimates");
  au->add_option("which", audit_which, "kernels, laplace, or densities")->required();
  au->add_option("--scene", scene_path, "scene JSON file");
  au->add_option("--out", out_dir, "output directory");
  au->add_option("--refinement", refinement, "override mesh refinement");
  gf.attach(au);

  auto* rc = app.add_subcommand("reconstruct", "carve an enclosing region from sweeps");
  rc->add_option("--scene", scene_path, "scene JSON file")->required();
  rc->add_option("--probe", probes_raw, "probe point x,y,z (repeatable)")->required();
  rc->add_option("--out", out_dir, "output directory");
  rc->add_option("--refinement", refinement, "override mesh refinement");
  rc->add_option("--margin", margin, "carve margin (< 0 selects the default)");
  rc->add_option("--resolution", resolution, "voxels per bounding-box edge");
  gf.attach(rc);

  auto* fx = app.add_subcommand("fixtures", "write the shipped example scenes");
  fx->add_option("--out", out_dir, "output directory");
  fx->add_option("--refinement", refinement, "refinement stored in the scene files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (v->parsed()) return cmd_scene_validate(scene_path, probes_raw, refinement);
    if (sw->parsed())
      return cmd_sweep(scene_path, probes_raw, gf, out_dir, refinement, noise, seed, false);
    if (ex->parsed())
      return cmd_sweep(scene_path, probes_raw, gf, out_dir, refinement, noise, seed, true);
    if (au->parsed()) {
      if (audit_which != "laplace" && scene_path.empty())
        throw UsageError("audit " + audit_which + " requires --scene");
      return cmd_audit(audit_which, scene_path, probes_raw, gf, out_dir, refinement);
    }
    if (rc->parsed())
      return cmd_reconstruct(scene_path, probes_raw, gf, out_dir, refinement, margin,
                             resolution);
    if (fx->parsed()) return cmd_fixtures(out_dir, refinement);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const AssumptionError& e) {
    std::cerr << "assumption violation: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
