// Python bindings for the cavity-enclosure toolkit.  The module exposes the
// main operations end to end: scene loading and fixtures, the broken-path
// oracle, the forward indicator, lambda grids + sweeps + length extraction,
// and the voxel enclosure.  Vectors are passed as plain 3-tuples/lists so the
// module has no numpy dependency.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>

#include "cavenc/bie_core.hpp"
#include "cavenc/enclosure_recon.hpp"
#include "cavenc/fixtures.hpp"
#include "cavenc/forward_indicator.hpp"
#include "cavenc/geometry.hpp"
#include "cavenc/laplace_asymptotics.hpp"
#include "cavenc/path_oracle.hpp"
#include "cavenc/scene_io.hpp"
#include "cavenc/spectral_extraction.hpp"

namespace py = pybind11;
using namespace cavenc;

namespace {

using Arr3 = std::array<double, 3>;

Vec3 to_vec(const Arr3& a) { return Vec3(a[0], a[1], a[2]); }
Arr3 to_arr(const Vec3& v) { return {v[0], v[1], v[2]}; }

std::vector<Vec3> to_vecs(const std::vector<Arr3>& pts) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto& a : pts) out.push_back(to_vec(a));
  return out;
}

spectral::GridOptions grid_options(const std::string& region, double mu_min, double mu_max,
                                   int count, double delta0, double delta1) {
  spectral::GridOptions g;
  g.region = spectral::region_from_name(region);
  g.mu_min = mu_min;
  g.mu_max = mu_max;
  g.count = count;
  g.delta0 = delta0;
  g.delta1 = delta1;
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cavity enclosure toolkit: forward indicator, length extraction, enclosure";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<AssumptionError>(m, "AssumptionError", PyExc_RuntimeError);

  // --- scenes ---------------------------------------------------------------
  py::class_<geom::Scene>(m, "Scene")
      .def_property_readonly("n_cavities", &geom::Scene::n_cavities)
      .def_readonly("refinement", &geom::Scene::refinement)
      .def_property_readonly("n_outer_nodes",
                             [](const geom::Scene& s) { return s.outer.size(); })
      .def_property_readonly("n_cavity_nodes",
                             [](const geom::Scene& s) { return s.total_cavity_nodes; })
      .def("half_min_cavity_gap", &geom::Scene::half_min_cavity_gap)
      .def("min_gap_to_outer", &geom::Scene::min_gap_to_outer)
      .def("to_json", [](const geom::Scene& s) { return geom::scene_to_json(s); })
      .def("__repr__", [](const geom::Scene& s) {
        return "<Scene cavities=" + std::to_string(s.n_cavities()) +
               " refinement=" + std::to_string(s.refinement) + ">";
      });

  m.def("load_scene", &geom::load_scene, py::arg("path"),
        "Load and discretize a scene from a JSON file.");
  m.def("scene_from_json", &geom::scene_from_json, py::arg("text"),
        "Build a scene from a JSON string.");
  m.def("save_scene", &geom::save_scene, py::arg("scene"), py::arg("path"));

  py::class_<fixtures::Fixture>(m, "Fixture")
      .def_readonly("name", &fixtures::Fixture::name)
      .def_readonly("scene", &fixtures::Fixture::scene)
      .def_readonly("l_exact", &fixtures::Fixture::l_exact)
      .def_readonly("notes", &fixtures::Fixture::notes)
      .def_property_readonly("probes", [](const fixtures::Fixture& f) {
        std::vector<Arr3> out;
        for (const auto& p : f.probes) out.push_back(to_arr(p));
        return out;
      });
  m.def("fixture_names", &fixtures::fixture_names);
  m.def("fixture", &fixtures::make_fixture, py::arg("name"), py::arg("refinement") = 2,
        "Built-in example scene with its probes and exact path length.");

  // --- broken-path oracle -----------------------------------------------------
  py::class_<path::Minimizer>(m, "Minimizer")
      .def_property_readonly("xi", [](const path::Minimizer& mm) { return to_arr(mm.xi); })
      .def_property_readonly("y", [](const path::Minimizer& mm) { return to_arr(mm.y); })
      .def_readonly("cavity", &path::Minimizer::cavity)
      .def_readonly("length", &path::Minimizer::length)
      .def_readonly("hplus", &path::Minimizer::hplus)
      .def_readonly("grad_norm", &path::Minimizer::grad_norm)
      .def_readonly("nondegenerate", &path::Minimizer::nondegenerate)
      .def_property_readonly("cls",
                             [](const path::Minimizer& mm) { return path::to_string(mm.cls); });

  py::class_<path::PathReport>(m, "PathReport")
      .def_readonly("length", &path::PathReport::length)
      .def_readonly("minimizers", &path::PathReport::minimizers)
      .def_readonly("degenerate_family", &path::PathReport::degenerate_family)
      .def_readonly("positivity_route", &path::PathReport::positivity_route)
      .def_readonly("isolated_nondegenerate", &path::PathReport::isolated_nondegenerate);

  m.def(
      "min_broken_path",
      [](const geom::Scene& scene, const Arr3& p) {
        return path::min_broken_path(scene, to_vec(p));
      },
      py::arg("scene"), py::arg("p"),
      "Minimum broken-path length |p-xi|+|xi-y| with its minimizer catalogue.");
  m.def(
      "check_assumptions",
      [](const geom::Scene& scene, const std::vector<Arr3>& probes) {
        auto rep = path::check_assumptions(scene, to_vecs(probes));
        py::dict d;
        d["scene_ok"] = rep.scene_ok;
        d["scene_message"] = rep.scene_message;
        d["all_ok"] = rep.all_ok();
        py::list pl;
        for (const auto& pa : rep.probes) {
          py::dict pd;
          pd["probe"] = to_arr(pa.probe);
          pd["probe_outside"] = pa.probe_outside;
          pd["length"] = pa.path.length;
          pd["positivity_route"] = pa.path.positivity_route;
          pd["degenerate_family"] = pa.path.degenerate_family;
          pl.append(pd);
        }
        d["probes"] = pl;
        return d;
      },
      py::arg("scene"), py::arg("probes"));

  // --- forward indicator ------------------------------------------------------
  py::class_<fwd::IndicatorSample>(m, "IndicatorSample")
      .def_readonly("lam", &fwd::IndicatorSample::lambda)
      .def_readonly("I0_direct", &fwd::IndicatorSample::I0_direct)
      .def_readonly("I0_kernel", &fwd::IndicatorSample::I0_kernel)
      .def_readonly("route_rel_diff", &fwd::IndicatorSample::route_rel_diff);

  m.def(
      "indicator",
      [](const geom::Scene& scene, Complex lam, const Arr3& p) {
        return fwd::run_indicator(scene, lam, to_vec(p));
      },
      py::arg("scene"), py::arg("lam"), py::arg("p"),
      "Indicator I0(lambda, p) by the direct and the kernel-expansion route.");

  // --- sweeps and extraction ---------------------------------------------------
  m.def("lambda_grid",
        [](const std::string& region, double mu_min, double mu_max, int count, double delta0,
           double delta1) {
          return spectral::lambda_grid(grid_options(region, mu_min, mu_max, count, delta0,
                                                    delta1));
        },
        py::arg("region") = "real", py::arg("mu_min") = 8.0, py::arg("mu_max") = 40.0,
        py::arg("count") = 9, py::arg("delta0") = 0.5, py::arg("delta1") = 0.1);

  py::class_<spectral::SweepSample>(m, "SweepSample")
      .def_readonly("lam", &spectral::SweepSample::lambda)
      .def_readonly("I0", &spectral::SweepSample::I0)
      .def_readonly("route_rel_diff", &spectral::SweepSample::route_rel_diff)
      .def_readonly("ok", &spectral::SweepSample::ok)
      .def_readonly("error", &spectral::SweepSample::error);

  py::class_<spectral::SweepResult>(m, "SweepResult")
      .def_readonly("samples", &spectral::SweepResult::samples)
      .def_readonly("n_failed", &spectral::SweepResult::n_failed)
      .def("csv", [](const spectral::SweepResult& r) { return spectral::sweep_csv(r); });

  m.def(
      "sweep",
      [](const geom::Scene& scene, const Arr3& p, const std::vector<Complex>& grid,
         bool with_route, double noise, std::uint64_t seed) {
        spectral::SweepOptions opt;
        opt.with_route = with_route;
        opt.noise = noise;
        opt.seed = seed;
        return spectral::sweep(scene, to_vec(p), grid, opt);
      },
      py::arg("scene"), py::arg("p"), py::arg("grid"), py::arg("with_route") = true,
      py::arg("noise") = 0.0, py::arg("seed") = 0);

  py::class_<spectral::FitResult>(m, "FitResult")
      .def_readonly("l_hat", &spectral::FitResult::l_hat)
      .def_readonly("a", &spectral::FitResult::a)
      .def_readonly("b", &spectral::FitResult::b)
      .def_readonly("stderr_l", &spectral::FitResult::stderr_l)
      .def_readonly("residual", &spectral::FitResult::residual)
      .def_readonly("n_used", &spectral::FitResult::n_used)
      .def("__repr__", [](const spectral::FitResult& f) {
        return "<FitResult l_hat=" + fmt_full(f.l_hat) + " stderr=" + fmt_full(f.stderr_l) +
               ">";
      });

  m.def(
      "extract_length",
      [](const spectral::SweepResult& r) { return spectral::extract_length(r.samples); },
      py::arg("sweep"),
      "Fit log|I0| = -l mu + a log mu + b and return l with its standard error.");

  // --- enclosure ----------------------------------------------------------------
  py::class_<recon::EnclosureGrid>(m, "EnclosureGrid")
      .def_property_readonly("shape",
                             [](const recon::EnclosureGrid& g) {
                               return std::array<int, 3>{g.n[0], g.n[1], g.n[2]};
                             })
      .def_readonly("margin_used", &recon::EnclosureGrid::margin_used)
      .def("voxel_diameter", &recon::EnclosureGrid::voxel_diameter)
      .def("retained", [](const recon::EnclosureGrid& g) {
        return g.count(recon::VoxelState::Retained);
      })
      .def("carved",
           [](const recon::EnclosureGrid& g) { return g.count(recon::VoxelState::Carved); })
      .def("vtk", [](const recon::EnclosureGrid& g) { return recon::vtk_structured_points(g); })
      .def("csv", [](const recon::EnclosureGrid& g) { return recon::grid_csv(g); });

  m.def(
      "enclose",
      [](const geom::Scene& scene, const std::vector<std::pair<Arr3, double>>& lengths,
         int resolution, double margin) {
        std::vector<recon::ProbeLength> pl;
        for (const auto& [p, l] : lengths) pl.push_back({to_vec(p), l, 0.0});
        recon::ReconOptions opt;
        opt.resolution = resolution;
        opt.margin = margin;
        return recon::enclose(scene.outer_spec, pl, opt);
      },
      py::arg("scene"), py::arg("lengths"), py::arg("resolution") = 64,
      py::arg("margin") = -1.0,
      "Carve the voxel region guaranteed to contain every cavity.");

  m.def(
      "soundness_check",
      [](const geom::Scene& truth, const recon::EnclosureGrid& grid) {
        auto rep = recon::soundness_check(truth, grid);
        py::dict d;
        d["n_samples"] = rep.n_samples;
        d["violations"] = rep.violations;
        d["fraction"] = rep.fraction;
        d["sound"] = rep.sound();
        return d;
      },
      py::arg("truth"), py::arg("grid"));

  m.def(
      "dist_to_outer",
      [](const geom::Scene& scene, const Arr3& x) {
        return recon::dist_to_outer(scene.outer_spec, to_vec(x));
      },
      py::arg("scene"), py::arg("x"));

  // --- stationary-phase audit helpers -------------------------------------------
  m.def(
      "laplace_ratio",
      [](const std::string& name, Complex lam) {
        lap::IntegralSpec spec = name == "gaussian"     ? lap::gaussian_spec()
                                 : name == "aniso_quad" ? lap::aniso_quad_spec()
                                 : name == "anisotropic"
                                     ? lap::anisotropic_spec()
                                     : throw UsageError("unknown integral spec " + name);
        Complex q = lap::quadrature_value(spec, lam);
        Complex a = lap::nondegenerate_asymptotic(spec, lam);
        return q / a;
      },
      py::arg("name"), py::arg("lam"),
      "Quadrature / leading-order ratio for a named peaked-integral test case.");
}
