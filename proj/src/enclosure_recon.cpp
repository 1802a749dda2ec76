#include "cavenc/enclosure_recon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavenc::recon {

bool EnclosureGrid::locate(const Vec3& x, int idx[3]) const {
  for (int a = 0; a < 3; ++a) {
    double t = (x[a] - origin[a]) / h[a];
    int i = static_cast<int>(std::floor(t));
    if (i < 0 || i >= n[a]) return false;
    idx[a] = i;
  }
  return true;
}

int EnclosureGrid::count(VoxelState s) const {
  return static_cast<int>(
      std::count(state.begin(), state.end(), static_cast<std::uint8_t>(s)));
}

EnclosureGrid make_grid(const geom::SurfaceSpec& outer, int resolution) {
  if (resolution < 2) throw UsageError("voxel resolution must be at least 2");
  // Axis-aligned bounding box of the outer surface: center +- reach per axis,
  // where the reach of a rotated ellipsoid along axis e is |diag(s) R^T e|.
  Vec3 reach;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = 1.0;
    reach[a] = (outer.semi_axes.asDiagonal() * (outer.rotation.transpose() * e)).norm();
  }
  EnclosureGrid g;
  g.origin = outer.center - reach;
  for (int a = 0; a < 3; ++a) {
    g.n[a] = resolution;
    g.h[a] = 2.0 * reach[a] / resolution;
  }
  g.state.assign(static_cast<std::size_t>(resolution) * resolution * resolution,
                 static_cast<std::uint8_t>(VoxelState::Outside));
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i)
        if (outer.implicit(g.center(i, j, k)) <= 1.0)
          g.state[g.index(i, j, k)] = static_cast<std::uint8_t>(VoxelState::Retained);
  return g;
}

double dist_to_outer(const geom::SurfaceSpec& outer, const Vec3& x) {
  if (outer.implicit(x) > 1.0 + 1e-12)
    throw AssumptionError("dist_to_outer: point lies outside the domain");
  return (x - outer.nearest_boundary_point(x)).norm();
}

void carve(EnclosureGrid& grid, const geom::SurfaceSpec& outer, const ProbeLength& probe,
           double margin) {
  if (!(probe.l_hat > 0)) throw UsageError("carve needs a positive recovered length");
  const double guard = margin + grid.voxel_diameter();
  for (int k = 0; k < grid.n[2]; ++k) {
    for (int j = 0; j < grid.n[1]; ++j) {
      for (int i = 0; i < grid.n[0]; ++i) {
        std::size_t id = grid.index(i, j, k);
        if (grid.state[id] != static_cast<std::uint8_t>(VoxelState::Retained)) continue;
        Vec3 c = grid.center(i, j, k);
        double F = (probe.p - c).norm() + dist_to_outer(outer, c);
        if (F < probe.l_hat - guard)
          grid.state[id] = static_cast<std::uint8_t>(VoxelState::Carved);
      }
    }
  }
}

EnclosureGrid enclose(const geom::SurfaceSpec& outer, const std::vector<ProbeLength>& probes,
                      const ReconOptions& opt) {
  if (probes.empty()) throw UsageError("enclosure needs at least one probe");
  EnclosureGrid g = make_grid(outer, opt.resolution);
  double margin = opt.margin;
  if (margin < 0) {
    double max_se = 0.0;
    for (const auto& pr : probes) max_se = std::max(max_se, pr.stderr_l);
    margin = std::max(g.voxel_diameter(), 1.5 * max_se);
  }
  g.margin_used = margin;
  for (const auto& pr : probes) carve(g, outer, pr, margin);
  return g;
}

SoundnessReport soundness_check(const geom::Scene& truth, const EnclosureGrid& grid,
                                int sample_refinement) {
  SoundnessReport rep;
  for (const auto& spec : truth.cavity_specs) {
    geom::DiscretizedSurface d = geom::discretize(spec, sample_refinement);
    for (int i = 0; i < d.size(); ++i) {
      ++rep.n_samples;
      int idx[3];
      if (!grid.locate(d.points.row(i), idx)) continue;
      if (grid.state[grid.index(idx[0], idx[1], idx[2])] ==
          static_cast<std::uint8_t>(VoxelState::Carved))
        ++rep.violations;
    }
  }
  rep.fraction = rep.n_samples > 0 ? static_cast<double>(rep.violations) / rep.n_samples : 0.0;
  return rep;
}

std::string vtk_structured_points(const EnclosureGrid& grid) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  os << "cavity enclosure mask: 0=outside 1=retained 2=carved (points are voxel centers)\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << grid.n[0] << ' ' << grid.n[1] << ' ' << grid.n[2] << '\n';
  Vec3 first = grid.center(0, 0, 0);
  os << "ORIGIN " << fmt_full(first[0]) << ' ' << fmt_full(first[1]) << ' '
     << fmt_full(first[2]) << '\n';
  os << "SPACING " << fmt_full(grid.h[0]) << ' ' << fmt_full(grid.h[1]) << ' '
     << fmt_full(grid.h[2]) << '\n';
  os << "POINT_DATA " << grid.state.size() << '\n';
  os << "SCALARS state unsigned_char 1\n";
  os << "LOOKUP_TABLE default\n";
  // x fastest, matching the VTK structured-points convention.
  std::size_t col = 0;
  for (std::size_t idx = 0; idx < grid.state.size(); ++idx) {
    os << static_cast<int>(grid.state[idx]);
    if (++col == 32 || idx + 1 == grid.state.size()) {
      os << '\n';
      col = 0;
    } else {
      os << ' ';
    }
  }
  return os.str();
}

std::string grid_csv(const EnclosureGrid& grid) {
  std::ostringstream os;
  os << "i,j,k,x,y,z,state\n";
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i) {
        std::uint8_t s = grid.state[grid.index(i, j, k)];
        if (s == static_cast<std::uint8_t>(VoxelState::Outside)) continue;
        Vec3 c = grid.center(i, j, k);
        os << i << ',' << j << ',' << k << ',' << fmt_full(c[0]) << ',' << fmt_full(c[1])
           << ',' << fmt_full(c[2]) << ',' << static_cast<int>(s) << '\n';
      }
  return os.str();
}

std::string enclosure_json(const EnclosureGrid& grid, const SoundnessReport* soundness) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"dimensions\": [" << grid.n[0] << ", " << grid.n[1] << ", " << grid.n[2] << "],\n";
  os << "  \"margin\": " << fmt_full(grid.margin_used) << ",\n";
  os << "  \"outside\": " << grid.count(VoxelState::Outside) << ",\n";
  os << "  \"retained\": " << grid.count(VoxelState::Retained) << ",\n";
  os << "  \"carved\": " << grid.count(VoxelState::Carved) << ",\n";
  if (soundness != nullptr) {
    os << "  \"soundness_samples\": " << soundness->n_samples << ",\n";
    os << "  \"soundness_violations\": " << soundness->violations << ",\n";
    os << "  \"soundness_fraction\": " << fmt_full(soundness->fraction) << "\n";
  } else {
    os << "  \"soundness_samples\": null,\n";
    os << "  \"soundness_violations\": null,\n";
    os << "  \"soundness_fraction\": null\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cavenc::recon
