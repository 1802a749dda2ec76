#include "cavenc/fixtures.hpp"

#include <cmath>
#include <limits>

namespace cavenc::fixtures {

using geom::FluxSpec;
using geom::make_ellipsoid;
using geom::make_sphere;
using geom::Scene;
using geom::SurfaceSpec;

std::vector<std::string> fixture_names() {
  return {"concentric", "two_spheres", "blocking", "ring", "ellipsoid", "null", "null_eps"};
}

namespace {
FluxSpec unit_constant_flux() {
  FluxSpec f;
  f.kind = "constant";
  f.value = 1.0;
  f.T = 1.0;
  return f;
}
}  // namespace

Fixture make_fixture(const std::string& name, int refinement) {
  Fixture fx;
  fx.name = name;
  FluxSpec flux = unit_constant_flux();

  if (name == "concentric") {
    fx.scene = geom::build_scene(make_sphere(Vec3::Zero(), 2.0),
                                 {make_sphere(Vec3::Zero(), 0.5)}, {2.0}, flux, refinement);
    fx.probes = {Vec3(3, 0, 0), Vec3(0, 4, 0)};
    fx.l_exact = 4.0;  // (3 - 0.5) + (2 - 0.5)
    fx.notes = "concentric spheres; spherically symmetric, closed-form solvable";
  } else if (name == "two_spheres") {
    fx.scene = geom::build_scene(
        make_sphere(Vec3::Zero(), 3.0),
        {make_sphere(Vec3(1.2, 0, 0), 1.0), make_sphere(Vec3(-1.2, 0, 0), 1.0)}, {1.5, 1.5},
        flux, refinement);
    fx.probes = {Vec3(5, 0, 0)};
    fx.l_exact = 3.6;  // (5 - 2.2) + (3 - 2.2)
    fx.notes = "two unit spheres, surface gap 0.4; multi-cavity coupling benchmark";
  } else if (name == "blocking") {
    fx.scene = geom::build_scene(make_ellipsoid(Vec3::Zero(), Vec3(2, 2, 1), Mat3::Identity()),
                                 {make_sphere(Vec3(0, 0, -0.45), 0.2)}, {1.0}, flux, refinement);
    fx.probes = {Vec3(0, 0, 2.5)};
    fx.l_exact = 3.5;  // entry and exit points on the axis tie: 2.75+0.75 = 3.15+0.35
    fx.notes = "segment probe->nearest outer point pierces the cavity; grazing pair expected";
  } else if (name == "ring") {
    fx.scene = geom::build_scene(make_sphere(Vec3::Zero(), 2.0),
                                 {make_sphere(Vec3(-1.2, 0, 0), 0.3)}, {1.0}, flux, refinement);
    fx.probes = {Vec3(3, 0, 0)};
    // Axisymmetric configuration: the minimum is attained on a circle at
    // cos(alpha) = 9/56 around the symmetry axis.
    fx.l_exact = std::sqrt(17.325) + 2.0 - std::sqrt(99.0 / 70.0);
    fx.notes = "rotationally symmetric minimizer ring (degenerate family)";
  } else if (name == "ellipsoid") {
    Mat3 rot =
        Eigen::AngleAxisd(30.0 * pi / 180.0, Vec3(1, 1, 0).normalized()).toRotationMatrix();
    fx.scene = geom::build_scene(
        make_sphere(Vec3::Zero(), 3.0),
        {make_ellipsoid(Vec3(0.3, -0.2, 0.1), Vec3(1.0, 0.6, 0.8), rot)}, {1.2}, flux,
        refinement);
    fx.probes = {Vec3(4.5, 0.5, -0.3), Vec3(-0.4, 4.6, 0.8)};
    fx.l_exact = -1.0;
    fx.notes = "rotated triaxial cavity; generic isolated minimizers";
  } else if (name == "null") {
    fx.scene = geom::build_scene(make_sphere(Vec3::Zero(), 2.0), {}, {}, flux, refinement);
    fx.probes = {Vec3(3, 0, 0)};
    fx.l_exact = std::numeric_limits<double>::infinity();
    fx.notes = "cavity-free control: the indicator must vanish";
  } else if (name == "null_eps") {
    fx.scene = geom::build_scene(make_sphere(Vec3::Zero(), 2.0),
                                 {make_sphere(Vec3::Zero(), 1e-3)}, {1.0}, flux, refinement);
    fx.probes = {Vec3(3, 0, 0)};
    fx.l_exact = (3.0 - 1e-3) + (2.0 - 1e-3);
    fx.notes = "vanishingly small cavity: indicator must sit far below the unit-scale one";
  } else {
    throw UsageError("unknown fixture: " + name);
  }
  return fx;
}

}  // namespace cavenc::fixtures
