#pragma once
// JSON (de)serialization of measurement scenes.  The schema is documented in
// docs/schema.md.

#include <string>

#include "cavenc/geometry.hpp"

namespace cavenc::geom {

/// Parse a scene from a JSON document (string form).  Throws UsageError on
/// schema violations; does not run geometric validation (see validate_scene).
Scene scene_from_json(const std::string& json_text);

/// Load a scene from a file path.
Scene load_scene(const std::string& path);

/// Serialize a scene back to canonical JSON text.
std::string scene_to_json(const Scene& scene);

void save_scene(const Scene& scene, const std::string& path);

}  // namespace cavenc::geom
