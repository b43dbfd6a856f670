/*
 * Copyright (C) 2026 The Umbracast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "umbracast/light_fitter.hpp"
#include "umbracast/report.hpp"
#include "umbracast/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace umbracast {

/// One manifest record. Paths are resolved against the manifest's directory.
struct ManifestEntry {
    std::string id; // defaults to the composite's file stem
    std::filesystem::path composite;
    std::filesystem::path object_mask;
    std::optional<std::filesystem::path> shadow_mask;
    std::filesystem::path point_map;
    SceneTag tag = SceneTag::Bos;
    std::optional<std::filesystem::path> target;   // reference image for eval
    std::optional<LightAngles> light;              // reference light
    std::optional<PinholeModel> intrinsics;        // else fitted from the point map
};

/// JSON array of entries; unknown fields are ignored. Throws MalformedConfig
/// for bad JSON or missing required fields, InvalidScene for duplicate ids.
std::vector<ManifestEntry> parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
std::string manifest_json(const std::vector<ManifestEntry>& entries, const std::filesystem::path& base_dir);

struct SceneTuple {
    ManifestEntry entry;
    Image8 composite; // RGB
    BinaryMask object;
    std::optional<BinaryMask> shadow;
    PointMap points;
};

/// Loads and cross-checks every raster; errors name the offending path and dims.
SceneTuple load_scene(const ManifestEntry& entry);

/// Camera intrinsics: the entry's if given, else a pinhole fit of the point map.
PinholeModel scene_intrinsics(const SceneTuple& scene);

/// {"azimuth_deg": a, "elevation_deg": e} or {"vector": [x, y, z]}.
UnitLightDirection parse_light_json(const std::string& json_text);
UnitLightDirection read_light_json(const std::filesystem::path& path);
std::string light_json(const UnitLightDirection& light);

/// Keys mirror FitConfig's fields; unknown keys are a MalformedConfig error.
FitConfig parse_fit_config(const std::string& json_text);

/// Keys mirror SynthSpec/BoxSpec; angles in degrees. Unknown keys are an error.
SynthSpec parse_synth_spec(const std::string& json_text);
std::string synth_spec_json(const SynthSpec& spec);

/// composite.png, target.png, object_mask.png, shadow_mask.png (the hard
/// cast, amodal), visible_shadow.png, point_map.upm, light.json, spec.json and
/// a single-entry manifest.json under `dir`. Returns the entry.
ManifestEntry write_synth_scene(const std::filesystem::path& dir, const std::string& id, const SyntheticScene& scene);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace umbracast
