#pragma once

#include <string>
#include <vector>

#include "nflab/field.hpp"

namespace nflab {

// Names of the presets compiled into the library.
std::vector<std::string> list_presets();

// Fetch a built-in preset by name; throws ValidationError for unknown names.
FieldPreset builtin_preset(const std::string& name);

// Parse a preset from a JSON file (see docs/schema.md for the key set).
FieldPreset load_preset_file(const std::string& path);

// Resolution order: built-in name, literal path, then <dir>/<name>.json for
// each colon-separated dir in NFLAB_PRESET_PATH.
FieldPreset resolve_preset(const std::string& name_or_path);

// Convenience: resolve and build in one step.
FieldHandle field_from_preset(const std::string& name_or_path);

} // namespace nflab
