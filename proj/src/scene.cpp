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

#include "umbracast/scene.hpp"

#include "umbracast/image_io.hpp"
#include "umbracast/pointmap_io.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace umbracast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedConfig, what); }

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        malformed(what + ": " + e.what());
    }
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) {
        malformed("'" + key + "' must be a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) {
        malformed("'" + key + "' must be an integer");
    }
    return j.get<int>();
}

std::string text(const json& j, const std::string& key) {
    if (!j.is_string()) {
        malformed("'" + key + "' must be a string");
    }
    return j.get<std::string>();
}

// Applies each key of `obj` through `setters`; unknown keys are errors.
void apply_keys(const json& obj, const std::string& what,
        const std::map<std::string, std::function<void(const json&)>>& setters) {
    if (!obj.is_object()) {
        malformed(what + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            malformed(what + ": unknown key '" + key + "'");
        }
        it->second(value);
    }
}

UnitLightDirection light_from_object(const json& j) {
    if (!j.is_object()) {
        malformed("light must be a JSON object");
    }
    if (j.contains("vector")) {
        const json& v = j["vector"];
        if (!v.is_array() || v.size() != 3) {
            malformed("light 'vector' must hold three numbers");
        }
        return light_from_vector(Vec3(number(v[0], "vector"), number(v[1], "vector"), number(v[2], "vector")));
    }
    if (!j.contains("azimuth_deg") || !j.contains("elevation_deg")) {
        malformed("light needs azimuth_deg and elevation_deg, or vector");
    }
    return light_from_angles(deg_to_rad(number(j["azimuth_deg"], "azimuth_deg")),
            deg_to_rad(number(j["elevation_deg"], "elevation_deg")));
}

PinholeModel model_from_object(const json& j) {
    PinholeModel m;
    apply_keys(j, "intrinsics", {
        {"fx", [&](const json& v) { m.fx = number(v, "fx"); }},
        {"fy", [&](const json& v) { m.fy = number(v, "fy"); }},
        {"cx", [&](const json& v) { m.cx = number(v, "cx"); }},
        {"cy", [&](const json& v) { m.cy = number(v, "cy"); }},
    });
    return m;
}

json model_to_json(const PinholeModel& m) { return {{"fx", m.fx}, {"fy", m.fy}, {"cx", m.cx}, {"cy", m.cy}}; }

std::string relative_to(const fs::path& p, const fs::path& base) {
    return fs::relative(p, base.empty() ? fs::path(".") : base).generic_string();
}

[[noreturn]] void dims_mismatch(const fs::path& a, Dims da, const fs::path& b, Dims db) {
    throw Error(ErrorCode::DimensionMismatch, b.string() + " is " + to_string(db) + " but " + a.string() +
            " is " + to_string(da));
}

} // namespace

std::vector<ManifestEntry> parse_manifest(const std::string& json_text, const fs::path& base_dir) {
    const json root = parse_json(json_text, "manifest");
    if (!root.is_array()) {
        malformed("manifest must be a JSON array");
    }
    std::vector<ManifestEntry> entries;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& j = root[i];
        const std::string where = "manifest entry " + std::to_string(i);
        if (!j.is_object()) {
            malformed(where + " must be an object");
        }
        auto path_field = [&](const char* key) -> std::optional<fs::path> {
            if (!j.contains(key)) {
                return std::nullopt;
            }
            return base_dir / text(j[key], key);
        };
        auto required = [&](const char* key) {
            auto p = path_field(key);
            if (!p) {
                malformed(where + ": missing '" + key + "'");
            }
            return *p;
        };
        ManifestEntry e;
        e.composite = required("composite");
        e.object_mask = required("object_mask");
        e.point_map = required("point_map");
        e.shadow_mask = path_field("shadow_mask");
        e.target = path_field("target");
        if (!j.contains("tag")) {
            malformed(where + ": missing 'tag'");
        }
        try {
            e.tag = parse_scene_tag(text(j["tag"], "tag"));
        } catch (const Error& err) {
            malformed(where + ": " + err.what());
        }
        e.id = j.contains("id") ? text(j["id"], "id") : e.composite.stem().string();
        if (e.id.empty() || e.id.find('/') != std::string::npos || e.id == "." || e.id == "..") {
            malformed(where + ": id '" + e.id + "' is not a plain name");
        }
        if (j.contains("light")) {
            e.light = light_from_object(j["light"]).angles();
        }
        if (j.contains("intrinsics")) {
            e.intrinsics = model_from_object(j["intrinsics"]);
        }
        if (!ids.insert(e.id).second) {
            throw Error(ErrorCode::InvalidScene, "manifest: duplicate id '" + e.id + "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    return parse_manifest(read_text_file(path), path.parent_path());
}

std::string manifest_json(const std::vector<ManifestEntry>& entries, const fs::path& base_dir) {
    json root = json::array();
    for (const auto& e : entries) {
        json j = {
            {"id", e.id},
            {"composite", relative_to(e.composite, base_dir)},
            {"object_mask", relative_to(e.object_mask, base_dir)},
            {"point_map", relative_to(e.point_map, base_dir)},
            {"tag", to_string(e.tag)},
        };
        if (e.shadow_mask) {
            j["shadow_mask"] = relative_to(*e.shadow_mask, base_dir);
        }
        if (e.target) {
            j["target"] = relative_to(*e.target, base_dir);
        }
        if (e.light) {
            j["light"] = {{"azimuth_deg", rad_to_deg(e.light->azimuth)}, {"elevation_deg", rad_to_deg(e.light->elevation)}};
        }
        if (e.intrinsics) {
            j["intrinsics"] = model_to_json(*e.intrinsics);
        }
        root.push_back(std::move(j));
    }
    return root.dump(2) + "\n";
}

SceneTuple load_scene(const ManifestEntry& entry) {
    SceneTuple s;
    s.entry = entry;
    s.composite = read_rgb_png(entry.composite);
    const Dims dims = s.composite.dims();
    s.object = read_mask_png(entry.object_mask);
    if (s.object.dims() != dims) {
        dims_mismatch(entry.composite, dims, entry.object_mask, s.object.dims());
    }
    if (entry.shadow_mask) {
        s.shadow = read_mask_png(*entry.shadow_mask);
        if (s.shadow->dims() != dims) {
            dims_mismatch(entry.composite, dims, *entry.shadow_mask, s.shadow->dims());
        }
    }
    s.points = read_pointmap(entry.point_map);
    if (s.points.dims() != dims) {
        dims_mismatch(entry.composite, dims, entry.point_map, s.points.dims());
    }
    return s;
}

PinholeModel scene_intrinsics(const SceneTuple& scene) {
    if (scene.entry.intrinsics) {
        return *scene.entry.intrinsics;
    }
    return fit_pinhole(scene.points).model;
}

UnitLightDirection parse_light_json(const std::string& json_text) {
    return light_from_object(parse_json(json_text, "light"));
}

UnitLightDirection read_light_json(const fs::path& path) {
    try {
        return parse_light_json(read_text_file(path));
    } catch (const Error& e) {
        // a bad light file is bad input data, not bad usage
        throw Error(e.code() == ErrorCode::MalformedConfig ? ErrorCode::InvalidScene : e.code(),
                path.string() + ": " + e.what());
    }
}

std::string light_json(const UnitLightDirection& light) {
    const Vec3& v = light.vector();
    json j = {
        {"azimuth_deg", rad_to_deg(light.azimuth())},
        {"elevation_deg", rad_to_deg(light.elevation())},
        {"vector", {v.x(), v.y(), v.z()}},
    };
    return j.dump(2) + "\n";
}

FitConfig parse_fit_config(const std::string& json_text) {
    const json root = parse_json(json_text, "fit config");
    FitConfig c;
    auto real = [](double& field, const char* key) {
        return std::function<void(const json&)>([&field, key](const json& v) { field = number(v, key); });
    };
    auto whole = [](int& field, const char* key) {
        return std::function<void(const json&)>([&field, key](const json& v) { field = integer(v, key); });
    };
    apply_keys(root, "fit config", {
        {"azimuth_step_deg", real(c.azimuth_step_deg, "azimuth_step_deg")},
        {"elevation_step_deg", real(c.elevation_step_deg, "elevation_step_deg")},
        {"elevation_min_deg", real(c.elevation_min_deg, "elevation_min_deg")},
        {"elevation_max_deg", real(c.elevation_max_deg, "elevation_max_deg")},
        {"w", real(c.w, "w")},
        {"sigma", real(c.sigma, "sigma")},
        {"working_width", whole(c.working.width, "working_width")},
        {"working_height", whole(c.working.height, "working_height")},
        {"occupancy_exponent", real(c.occupancy_exponent, "occupancy_exponent")},
        {"occupancy_half", real(c.occupancy_half, "occupancy_half")},
        {"layer_sharpness", real(c.layer_sharpness, "layer_sharpness")},
        {"max_footprint", real(c.max_footprint, "max_footprint")},
        {"occluder_supersample", whole(c.occluder_supersample, "occluder_supersample")},
        {"max_iters", whole(c.max_iters, "max_iters")},
        {"fd_step_deg", real(c.fd_step_deg, "fd_step_deg")},
        {"initial_step_deg", real(c.initial_step_deg, "initial_step_deg")},
        {"shrink", real(c.shrink, "shrink")},
        {"armijo_c", real(c.armijo_c, "armijo_c")},
        {"max_halvings", whole(c.max_halvings, "max_halvings")},
        {"grad_tolerance", real(c.grad_tolerance, "grad_tolerance")},
        {"step_tolerance", real(c.step_tolerance, "step_tolerance")},
        {"max_penalty", real(c.max_penalty, "max_penalty")},
        {"max_dice", real(c.max_dice, "max_dice")},
    });
    return c;
}

SynthSpec parse_synth_spec(const std::string& json_text) {
    const json root = parse_json(json_text, "synth spec");
    SynthSpec s;
    double light_az = rad_to_deg(s.light.azimuth);
    double light_el = rad_to_deg(s.light.elevation);
    double yaw = rad_to_deg(s.box.yaw);
    apply_keys(root, "synth spec", {
        {"width", [&](const json& v) { s.dims.width = integer(v, "width"); }},
        {"height", [&](const json& v) { s.dims.height = integer(v, "height"); }},
        {"intrinsics", [&](const json& v) { s.model = model_from_object(v); }},
        {"ground_height", [&](const json& v) { s.ground_height = number(v, "ground_height"); }},
        {"max_depth", [&](const json& v) { s.max_depth = number(v, "max_depth"); }},
        {"seed", [&](const json& v) {
            if (!v.is_number_unsigned()) {
                malformed("'seed' must be a non-negative integer");
            }
            s.seed = v.get<std::uint64_t>();
        }},
        {"light", [&](const json& v) {
            apply_keys(v, "synth spec light", {
                {"azimuth_deg", [&](const json& x) { light_az = number(x, "azimuth_deg"); }},
                {"elevation_deg", [&](const json& x) { light_el = number(x, "elevation_deg"); }},
            });
        }},
        {"box", [&](const json& v) {
            apply_keys(v, "synth spec box", {
                {"center_x", [&](const json& x) { s.box.center_x = number(x, "center_x"); }},
                {"center_z", [&](const json& x) { s.box.center_z = number(x, "center_z"); }},
                {"width", [&](const json& x) { s.box.width = number(x, "width"); }},
                {"depth", [&](const json& x) { s.box.depth = number(x, "depth"); }},
                {"height", [&](const json& x) { s.box.height = number(x, "height"); }},
                {"lift", [&](const json& x) { s.box.lift = number(x, "lift"); }},
                {"yaw_deg", [&](const json& x) { yaw = number(x, "yaw_deg"); }},
            });
        }},
    });
    if (s.dims.width <= 0 || s.dims.height <= 0) {
        malformed("synth spec: width and height must be positive");
    }
    s.light = {deg_to_rad(light_az), deg_to_rad(light_el)};
    s.box.yaw = deg_to_rad(yaw);
    return s;
}

std::string synth_spec_json(const SynthSpec& s) {
    json j = {
        {"width", s.dims.width},
        {"height", s.dims.height},
        {"intrinsics", model_to_json(s.model)},
        {"ground_height", s.ground_height},
        {"max_depth", s.max_depth},
        {"seed", s.seed},
        {"light", {{"azimuth_deg", rad_to_deg(s.light.azimuth)}, {"elevation_deg", rad_to_deg(s.light.elevation)}}},
        {"box", {
            {"center_x", s.box.center_x},
            {"center_z", s.box.center_z},
            {"width", s.box.width},
            {"depth", s.box.depth},
            {"height", s.box.height},
            {"lift", s.box.lift},
            {"yaw_deg", rad_to_deg(s.box.yaw)},
        }},
    };
    return j.dump(2) + "\n";
}

ManifestEntry write_synth_scene(const fs::path& dir, const std::string& id, const SyntheticScene& scene) {
    fs::create_directories(dir);
    write_png(dir / "composite.png", scene.composite);
    write_png(dir / "target.png", scene.target);
    write_mask_png(dir / "object_mask.png", scene.object);
    write_mask_png(dir / "shadow_mask.png", scene.shadow);
    write_mask_png(dir / "visible_shadow.png", scene.visible_shadow);
    write_pointmap(dir / "point_map.upm", scene.points);
    write_text_file(dir / "light.json", light_json(scene.light));
    write_text_file(dir / "spec.json", synth_spec_json(scene.spec));

    ManifestEntry e;
    e.id = id;
    e.composite = dir / "composite.png";
    e.object_mask = dir / "object_mask.png";
    e.shadow_mask = dir / "shadow_mask.png";
    e.point_map = dir / "point_map.upm";
    e.target = dir / "target.png";
    e.tag = SceneTag::BosFree;
    e.light = scene.light.angles();
    e.intrinsics = scene.spec.model;
    write_text_file(dir / "manifest.json", manifest_json({e}, dir));
    return e;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "missing file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
    }
}

} // namespace umbracast
