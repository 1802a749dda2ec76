#pragma once

// Geometric cavity enclosure from recovered path lengths.
//
// Every cavity boundary point xi satisfies |p - xi| + dist(xi, outer) >= l(p)
// for every exterior probe p, and (by the triangle inequality) so does every
// interior cavity point.  Carving the sub-level sets of
//   F_p(x) = |p - x| + dist(x, outer boundary)
// below the recovered lengths therefore leaves a region guaranteed to contain
// the cavities.  The carve predicate subtracts the Lipschitz slack of F over a
// voxel (F is 2-Lipschitz, so its variation over a voxel is at most the voxel
// diameter) in addition to the user margin, which makes carving sound even at
// margin 0 with exact lengths.

#include <cstdint>
#include <string>
#include <vector>

#include "cavenc/geometry.hpp"

namespace cavenc::recon {

enum class VoxelState : std::uint8_t { Outside = 0, Retained = 1, Carved = 2 };

struct ProbeLength {
  Vec3 p;
  double l_hat = 0.0;
  double stderr_l = 0.0;
};

struct ReconOptions {
  int resolution = 64;   ///< voxels per bounding-box edge
  double margin = -1.0;  ///< carve margin; < 0 selects the default
                         ///< max(voxel diameter, 1.5 x max stderr)
};

struct EnclosureGrid {
  Vec3 origin;  ///< corner of the voxel lattice
  Vec3 h;       ///< voxel edge lengths
  int n[3] = {0, 0, 0};
  std::vector<std::uint8_t> state;  ///< VoxelState, x fastest
  double margin_used = 0.0;

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n[0]) * (j + static_cast<std::size_t>(n[1]) * k);
  }
  Vec3 center(int i, int j, int k) const {
    return origin + Vec3((i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
  }
  double voxel_diameter() const { return h.norm(); }
  /// Voxel containing x, or false if outside the lattice.
  bool locate(const Vec3& x, int idx[3]) const;
  int count(VoxelState s) const;
};

/// Lattice over the outer surface's bounding box; voxels with centers outside
/// the closed domain are marked Outside, the rest Retained.
EnclosureGrid make_grid(const geom::SurfaceSpec& outer, int resolution);

/// Distance from an interior point to the outer boundary.  Throws
/// AssumptionError if x lies outside the closed domain.
double dist_to_outer(const geom::SurfaceSpec& outer, const Vec3& x);

/// Mark Carved every Retained voxel whose center satisfies
///   |p - x| + dist_to_outer(x) < l_hat - margin - voxel_diameter.
void carve(EnclosureGrid& grid, const geom::SurfaceSpec& outer, const ProbeLength& probe,
           double margin);

/// Sequential carving over all probes with the resolved margin.
EnclosureGrid enclose(const geom::SurfaceSpec& outer, const std::vector<ProbeLength>& probes,
                      const ReconOptions& opt = {});

struct SoundnessReport {
  int n_samples = 0;
  int violations = 0;
  double fraction = 0.0;
  bool sound() const { return violations == 0; }
};

/// Fraction of true cavity-boundary sample points (taken from a fine
/// discretization of the scene's cavities) that fall in Carved voxels.
SoundnessReport soundness_check(const geom::Scene& truth, const EnclosureGrid& grid,
                                int sample_refinement = 4);

/// Plain-text legacy VTK structured-points export.  Each lattice point is a
/// voxel center; the scalar field holds the VoxelState codes
/// (0 = outside, 1 = retained, 2 = carved).
std::string vtk_structured_points(const EnclosureGrid& grid);

/// CSV of non-outside voxels: i,j,k,x,y,z,state.
std::string grid_csv(const EnclosureGrid& grid);

/// Structured summary: counts, margin, soundness when available (pass
/// violations < 0 if no truth was checked).
std::string enclosure_json(const EnclosureGrid& grid, const SoundnessReport* soundness);

}  // namespace cavenc::recon
