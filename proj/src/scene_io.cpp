#include "cavenc/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cavenc::geom {

using nlohmann::json;

namespace {

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw UsageError(std::string(what) + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3 parse_rotation(const json& j) {
  if (j.is_array() && j.size() == 3 && j[0].is_array()) {
    Mat3 R;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) R(r, c) = j[r][c].get<double>();
    if ((R * R.transpose() - Mat3::Identity()).norm() > 1e-8)
      throw UsageError("rotation matrix is not orthonormal");
    return R;
  }
  if (j.is_object() && j.contains("axis") && j.contains("angle_deg")) {
    Vec3 axis = parse_vec3(j["axis"], "rotation axis").normalized();
    double ang = j["angle_deg"].get<double>() * pi / 180.0;
    return Eigen::AngleAxisd(ang, axis).toRotationMatrix();
  }
  throw UsageError("rotation must be a 3x3 matrix or {axis, angle_deg}");
}

SurfaceSpec parse_surface(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("shape"))
    throw UsageError(std::string(what) + " must be an object with a 'shape' key");
  std::string shape = j["shape"].get<std::string>();
  SurfaceSpec s;
  if (j.contains("center")) s.center = parse_vec3(j["center"], "center");
  if (shape == "sphere") {
    if (!j.contains("radius")) throw UsageError("sphere needs a 'radius'");
    double r = j["radius"].get<double>();
    if (r <= 0) throw UsageError("sphere radius must be positive");
    s.semi_axes = Vec3::Constant(r);
  } else if (shape == "ellipsoid") {
    if (!j.contains("semi_axes")) throw UsageError("ellipsoid needs 'semi_axes'");
    s.semi_axes = parse_vec3(j["semi_axes"], "semi_axes");
    if ((s.semi_axes.array() <= 0).any())
      throw UsageError("ellipsoid semi-axes must be positive");
    if (j.contains("rotation")) s.rotation = parse_rotation(j["rotation"]);
  } else {
    throw UsageError("unknown shape '" + shape + "' (want sphere or ellipsoid)");
  }
  return s;
}

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json surface_to_json(const SurfaceSpec& s) {
  json j;
  j["center"] = vec3_to_json(s.center);
  if (s.is_sphere() && s.rotation.isIdentity(1e-14)) {
    j["shape"] = "sphere";
    j["radius"] = s.semi_axes[0];
  } else {
    j["shape"] = "ellipsoid";
    j["semi_axes"] = vec3_to_json(s.semi_axes);
    if (!s.rotation.isIdentity(1e-14)) {
      json R = json::array();
      for (int r = 0; r < 3; ++r)
        R.push_back(json::array({s.rotation(r, 0), s.rotation(r, 1), s.rotation(r, 2)}));
      j["rotation"] = R;
    }
  }
  return j;
}

}  // namespace

Scene scene_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("scene must be a JSON object");
  if (!j.contains("outer")) throw UsageError("scene needs an 'outer' surface");
  if (!j.contains("cavities") || !j["cavities"].is_array())
    throw UsageError("scene needs a 'cavities' array (may be empty)");

  SurfaceSpec outer = parse_surface(j["outer"], "outer");
  std::vector<SurfaceSpec> cavities;
  std::vector<double> rho;
  for (const auto& cj : j["cavities"]) {
    cavities.push_back(parse_surface(cj, "cavity"));
    rho.push_back(cj.value("rho", 1.0));
  }

  FluxSpec flux;
  if (j.contains("flux")) {
    const auto& fj = j["flux"];
    flux.kind = fj.value("kind", "constant");
    flux.value = fj.value("value", 1.0);
    flux.f0 = fj.value("f0", 1.0);
    flux.slope = fj.value("slope", 0.0);
    flux.T = fj.value("T", 1.0);
  }
  int refinement = j.value("refinement", 2);
  return build_scene(outer, std::move(cavities), std::move(rho), flux, refinement);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

std::string scene_to_json(const Scene& scene) {
  json j;
  j["outer"] = surface_to_json(scene.outer_spec);
  json cav = json::array();
  for (size_t k = 0; k < scene.cavity_specs.size(); ++k) {
    json cj = surface_to_json(scene.cavity_specs[k]);
    cj["rho"] = scene.rho[k];
    cav.push_back(cj);
  }
  j["cavities"] = cav;
  json fj;
  fj["kind"] = scene.flux.kind;
  if (scene.flux.kind == "constant") {
    fj["value"] = scene.flux.value;
  } else {
    fj["f0"] = scene.flux.f0;
    fj["slope"] = scene.flux.slope;
  }
  fj["T"] = scene.flux.T;
  j["flux"] = fj;
  j["refinement"] = scene.refinement;
  return j.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write scene file: " + path);
  out << scene_to_json(scene);
}

}  // namespace cavenc::geom
