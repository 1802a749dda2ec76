#pragma once

// Canonical benchmark scenes with known geometry.
//
// Each fixture bundles a scene, a set of exterior probe points, and (where a
// closed form exists) the exact minimum broken-path length for the primary
// probe.  The same constructions back the unit tests, the acceptance suite,
// and the `fixtures` CLI subcommand that materializes them as scene files.

#include <string>
#include <vector>

#include "cavenc/geometry.hpp"

namespace cavenc::fixtures {

struct Fixture {
  std::string name;
  geom::Scene scene;
  std::vector<Vec3> probes;
  /// Exact minimum broken-path length for probes[0]; negative if no closed
  /// form is available, +inf for cavity-free scenes.
  double l_exact = -1.0;
  std::string notes;
};

/// Names accepted by make_fixture, in canonical order.
std::vector<std::string> fixture_names();

/// Build a fixture at the given mesh refinement level.
Fixture make_fixture(const std::string& name, int refinement = 2);

}  // namespace cavenc::fixtures
