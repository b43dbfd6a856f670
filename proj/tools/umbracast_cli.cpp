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

#include "umbracast/compositor.hpp"
#include "umbracast/image_io.hpp"
#include "umbracast/metrics.hpp"
#include "umbracast/report.hpp"
#include "umbracast/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace umbracast;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Usage: return kExitUsage;
        case ErrorCategory::Numerical: return kExitNumerical;
        default: return kExitData;
    }
}

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

std::vector<ManifestEntry> select(const std::vector<ManifestEntry>& all, const std::string& id) {
    if (id.empty()) {
        return all;
    }
    for (const auto& e : all) {
        if (e.id == id) {
            return {e};
        }
    }
    usage("no scene with id '" + id + "' in the manifest");
}

UnitLightDirection parse_light_flag(const std::string& text) {
    std::istringstream ss(text);
    double phi = 0.0, theta = 0.0;
    char comma = 0;
    if (!(ss >> phi >> comma >> theta) || comma != ',' || !(ss >> std::ws).eof()) {
        usage("--light expects <phi,theta> in degrees, got '" + text + "'");
    }
    return light_from_angles(deg_to_rad(phi), deg_to_rad(theta));
}

Image8 normalized_gray(const RealRaster& r) {
    double hi = 0.0;
    for (double v : r.data()) {
        hi = std::max(hi, v);
    }
    Image8 out(r.dims());
    for (std::size_t i = 0; i < r.size(); ++i) {
        out.data()[i] = hi > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * r.data()[i] / hi)) : 0;
    }
    return out;
}

json report_to_json(const CastReport& r) {
    return {{"n_cast", r.n_cast}, {"n_negative_t", r.n_negative_t}, {"n_backfacing", r.n_backfacing},
            {"n_offscreen", r.n_offscreen}, {"total", r.total()}, {"failed", r.failed()}};
}

json angles_to_json(const LightAngles& a) {
    return {{"azimuth_deg", rad_to_deg(a.azimuth)}, {"elevation_deg", rad_to_deg(a.elevation)}};
}

json objective_to_json(const FitObjectiveValue& v) {
    return {{"total", v.total}, {"dice_term", v.dice_term}, {"penalty_term", v.penalty_term},
            {"w", v.weight_w}, {"grazing", v.grazing}, {"cast_report", report_to_json(v.report)}};
}

json vec_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// One pixel per sweep cell, scaled up; low objective is bright.
Image8 sweep_heatmap(const SweepResult& s, int zoom = 8) {
    const int na = static_cast<int>(s.azimuths.size());
    const int ne = static_cast<int>(s.elevations.size());
    double lo = INFINITY, hi = -INFINITY;
    for (double v : s.objective_table) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Image8 out(na * zoom, ne * zoom);
    for (int e = 0; e < ne; ++e) {
        for (int a = 0; a < na; ++a) {
            const double v = s.objective_table[static_cast<std::size_t>(e) * na + a];
            const double t = hi > lo ? (hi - v) / (hi - lo) : 1.0;
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
            // highest elevation on top
            const int row = ne - 1 - e;
            for (int y = 0; y < zoom; ++y) {
                for (int x = 0; x < zoom; ++x) {
                    out.at(a * zoom + x, row * zoom + y) = g;
                }
            }
        }
    }
    return out;
}

void cmd_cast(const fs::path& manifest, const std::string& id, const std::string& light_text,
        const fs::path& light_file, double tau_deg, std::uint64_t seed, const fs::path& out) {
    if (!(tau_deg > 0.0 && tau_deg < 90.0)) {
        usage("--tau must lie in (0, 90) degrees");
    }
    for (const auto& entry : select(read_manifest(manifest), id)) {
        std::optional<UnitLightDirection> light;
        if (!light_text.empty()) {
            light = parse_light_flag(light_text);
        } else if (!light_file.empty()) {
            light = read_light_json(light_file);
        } else if (entry.light) {
            light = light_from_angles(entry.light->azimuth, entry.light->elevation);
        } else {
            usage("scene '" + entry.id + "' has no light; pass --light or --light-json");
        }
        const SceneTuple scene = load_scene(entry);
        const PinholeModel model = scene_intrinsics(scene);
        const ReceiverPlane plane = fit_receiver_plane(scene.points, scene.object, seed);
        const ShadowEstimate est = estimate_shadow(scene.points, scene.object, *light, deg_to_rad(tau_deg));
        const CastResult cast = cast_hard(scene.points, scene.object, *light, plane, model);
        const ShadowRender render = soft_splat(cast.points, model, scene.points.dims(), 1.0);

        const fs::path dir = out / entry.id;
        write_mask_png(dir / "estimate.png", est.mask);
        write_png(dir / "render.png", normalized_gray(render.density));
        json j = {
            {"id", entry.id},
            {"light", angles_to_json(light->angles())},
            {"tau_deg", tau_deg},
            {"estimate_resolution", {est.resolution.width, est.resolution.height}},
            {"estimate_pixels", est.mask.count()},
            {"cast_report", report_to_json(cast.report)},
            {"plane", {{"anchor", vec_to_json(plane.anchor())}, {"normal", vec_to_json(plane.normal())}}},
        };
        write_text_file(dir / "cast_report.json", j.dump(2) + "\n");
    }
}

void cmd_fit(const fs::path& manifest, const std::string& id, const fs::path& config_path, std::uint64_t seed,
        const fs::path& out) {
    FitConfig config;
    if (!config_path.empty()) {
        config = parse_fit_config(read_text_file(config_path));
    }
    for (const auto& entry : select(read_manifest(manifest), id)) {
        const SceneTuple scene = load_scene(entry);
        if (!scene.shadow) {
            throw Error(ErrorCode::InvalidScene, "scene '" + entry.id + "' has no shadow_mask to fit against");
        }
        const PinholeModel model = scene_intrinsics(scene);
        const ReceiverPlane plane = fit_receiver_plane(scene.points, scene.object, seed);
        const FitProblem problem(scene.points, scene.object, *scene.shadow, plane, model, config);
        const FitOutput fit = fit_light(problem);
        const FitResult& r = fit.result;

        json j = {
            {"id", entry.id},
            {"light", angles_to_json(r.direction.angles())},
            {"vector", vec_to_json(r.direction.vector())},
            {"objective", objective_to_json(r.objective)},
            {"sweep_best", angles_to_json(r.sweep_best)},
            {"sweep_objective", objective_to_json(r.sweep_objective)},
            {"refine_iterations", r.refine_iterations},
            {"converged", r.converged},
            {"reliable", r.reliable},
            {"trace", r.trace},
            {"plane", {{"anchor", vec_to_json(plane.anchor())}, {"normal", vec_to_json(plane.normal())}}},
            {"intrinsics", {{"fx", model.fx}, {"fy", model.fy}, {"cx", model.cx}, {"cy", model.cy}}},
        };
        if (entry.light) {
            const auto truth = light_from_angles(entry.light->azimuth, entry.light->elevation);
            j["reference_light"] = angles_to_json(truth.angles());
            j["angular_error_deg"] = angular_error(r.direction, truth);
        }
        const fs::path dir = out / entry.id;
        write_text_file(dir / "fit.json", j.dump(2) + "\n");
        write_text_file(dir / "light.json", light_json(r.direction));
        write_png(dir / "sweep.png", sweep_heatmap(fit.sweep));
        write_mask_png(dir / "induced_shadow.png", fit.induced_shadow);
    }
}

fs::path choose_prediction(const fs::path& root, bool best_of, const Image8* gt, const BinaryMask* gt_mask) {
    if (!best_of) {
        return root;
    }
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::MissingFile, "missing prediction directory: " + root.string());
    }
    std::vector<fs::path> seeds;
    for (const auto& d : fs::directory_iterator(root)) {
        if (d.is_directory()) {
            seeds.push_back(d.path());
        }
    }
    std::sort(seeds.begin(), seeds.end());
    if (seeds.empty()) {
        throw Error(ErrorCode::MissingFile, "no seed directories under " + root.string());
    }
    if (!gt || !gt_mask) {
        return seeds.front();
    }
    // highest local SSIM wins; ties keep the first in name order
    fs::path best = seeds.front();
    double best_score = -INFINITY;
    for (const auto& s : seeds) {
        const double score = ssim(read_rgb_png(s / "image.png"), *gt, *gt_mask);
        if (score > best_score) {
            best_score = score;
            best = s;
        }
    }
    return best;
}

void cmd_eval(const fs::path& manifest, const fs::path& pred_dir, fs::path out, bool best_of,
        const std::string& method) {
    if (out.extension() == ".json" || out.extension() == ".csv") {
        out.replace_extension();
    }
    const auto entries = read_manifest(manifest);
    std::vector<BatchItem> items(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const ManifestEntry& e = entries[i];
        BatchItem& it = items[i];
        it.id = e.id;
        it.tag = e.tag;
        if (e.light) {
            it.gt_light = light_from_angles(e.light->azimuth, e.light->elevation);
        }
        try {
            if (!e.target) {
                throw Error(ErrorCode::InvalidScene, "no target image in the manifest");
            }
            if (!e.shadow_mask) {
                throw Error(ErrorCode::InvalidScene, "no shadow_mask in the manifest");
            }
            it.gt = read_rgb_png(*e.target);
            it.gt_mask = read_mask_png(*e.shadow_mask);
            const fs::path pred = choose_prediction(pred_dir / e.id, best_of, &it.gt, &it.gt_mask);
            it.generated = read_rgb_png(pred / "image.png");
            it.pred_mask = read_mask_png(pred / "mask.png");
            if (fs::exists(pred / "light.json")) {
                it.pred_light = read_light_json(pred / "light.json");
            }
        } catch (const Error& err) {
            it.load_error = err.what();
            if (!it.pred_light && fs::exists(pred_dir / e.id / "light.json")) {
                it.pred_light = read_light_json(pred_dir / e.id / "light.json");
            }
        }
    }
    const BatchReport report = batch_report(items);
    fs::path stem = out;
    write_text_file(fs::path(stem.string() + ".json"), report_json(report, method));
    write_text_file(fs::path(stem.string() + "_table1.csv"), table1_csv(report, method));
    write_text_file(fs::path(stem.string() + "_table2.csv"), table2_csv(report));
    for (const auto& r : report.items) {
        if (!r.error.empty()) {
            std::cerr << "warning: " << r.id << ": " << r.error << "\n";
        }
    }
    if (report.failures > 0) {
        std::cerr << "warning: " << report.failures << " item(s) excluded from image metrics\n";
    }
}

void cmd_preview(const fs::path& manifest, const std::string& id, const fs::path& mask_path, const fs::path& out,
        double scale, double bias, double feather) {
    auto entries = select(read_manifest(manifest), id);
    if (entries.size() != 1) {
        usage("manifest holds several scenes; pick one with --id");
    }
    if (!(scale >= 0.0 && scale <= 4.0)) {
        usage("--scale must lie in [0, 4]");
    }
    if (!(feather >= 0.0)) {
        usage("--feather must be non-negative");
    }
    const Image8 image = read_rgb_png(entries[0].composite);
    const BinaryMask mask = read_mask_png(mask_path);
    if (mask.dims() != image.dims()) {
        throw Error(ErrorCode::DimensionMismatch, mask_path.string() + " is " + to_string(mask.dims()) + " but " +
                entries[0].composite.string() + " is " + to_string(image.dims()));
    }
    PreviewOptions opt;
    opt.darkening = {{scale}, {bias}};
    opt.feather_sigma = feather;
    write_png(out, render_preview(image, mask, opt));
}

void cmd_synth(const fs::path& spec_path, bool random, std::uint64_t seed, int count, double min_el, double max_el,
        const std::string& id, const fs::path& out) {
    std::vector<std::pair<std::string, SynthSpec>> specs;
    if (random) {
        if (!spec_path.empty()) {
            usage("--spec and --random are exclusive");
        }
        if (count < 1) {
            usage("--count must be positive");
        }
        if (!(min_el > 0.0 && min_el <= max_el && max_el <= 85.0)) {
            usage("need 0 < --min-elevation <= --max-elevation <= 85");
        }
        for (int i = 0; i < count; ++i) {
            const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
            specs.emplace_back("seed" + std::to_string(s), random_synth_spec(s, min_el, max_el));
        }
    } else {
        if (spec_path.empty()) {
            usage("synth needs --spec <json> or --random");
        }
        specs.emplace_back(id, parse_synth_spec(read_text_file(spec_path)));
    }
    std::vector<ManifestEntry> entries;
    for (const auto& [name, spec] : specs) {
        entries.push_back(write_synth_scene(out / name, name, synth_scene(spec)));
    }
    write_text_file(out / "manifest.json", manifest_json(entries, out));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"umbracast: geometry-driven cast-shadow estimation, light fitting and evaluation"};
    app.require_subcommand(1);

    fs::path scene, out, light_file, config, pred_dir, mask, spec;
    std::string id, light_text, method = "umbracast";
    double tau = 5.0, scale = 0.55, bias = 0.0, feather = 2.0, min_el = 15.0, max_el = 75.0;
    std::uint64_t seed = 0;
    bool best_of = false, random = false;
    int count = 1;

    auto* cast = app.add_subcommand("cast", "Shadow estimate and hard cast for a light");
    cast->add_option("--scene", scene, "Scene manifest")->required();
    cast->add_option("--id", id, "Only this manifest entry");
    auto* light_opt = cast->add_option("--light", light_text, "Light as phi,theta in degrees");
    cast->add_option("--light-json", light_file, "Light JSON file")->excludes(light_opt);
    cast->add_option("--tau", tau, "Angular tolerance, degrees")->capture_default_str();
    cast->add_option("--seed", seed, "Receiver-plane RANSAC seed")->capture_default_str();
    cast->add_option("--out", out, "Output directory")->required();

    auto* fit = app.add_subcommand("fit-light", "Fit the light direction to a shadow mask");
    fit->add_option("--scene", scene, "Scene manifest")->required();
    fit->add_option("--id", id, "Only this manifest entry");
    fit->add_option("--config", config, "Fit configuration JSON");
    fit->add_option("--seed", seed, "Receiver-plane RANSAC seed")->capture_default_str();
    fit->add_option("--out", out, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Batch metrics against a manifest");
    eval->add_option("--manifest", scene, "Manifest with targets and shadow masks")->required();
    eval->add_option("--pred-dir", pred_dir, "Predictions, <dir>/<id>/{image,mask}.png")->required();
    eval->add_option("--out", out, "Report stem; writes .json, _table1.csv, _table2.csv")->required();
    eval->add_flag("--best-of", best_of, "Each <id> holds seed subdirectories; keep the best local SSIM");
    eval->add_option("--method", method, "Method name in the image-quality table row")->capture_default_str();

    auto* preview = app.add_subcommand("preview", "Darken the composite inside a shadow mask");
    preview->add_option("--scene", scene, "Scene manifest")->required();
    preview->add_option("--id", id, "Manifest entry");
    preview->add_option("--mask", mask, "Shadow mask PNG")->required();
    preview->add_option("--out", out, "Output PNG")->required();
    preview->add_option("--scale", scale, "Darkening scale in [0, 4]")->capture_default_str();
    preview->add_option("--bias", bias, "Darkening bias")->capture_default_str();
    preview->add_option("--feather", feather, "Edge feather sigma, pixels")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Synthetic box-on-ground scenes");
    synth->add_option("--spec", spec, "Scene spec JSON");
    synth->add_flag("--random", random, "Draw random specs from --seed");
    synth->add_option("--seed", seed, "First random seed")->capture_default_str();
    synth->add_option("--count", count, "Random scene count")->capture_default_str();
    synth->add_option("--min-elevation", min_el, "Random light elevation lower bound, degrees")->capture_default_str();
    synth->add_option("--max-elevation", max_el, "Random light elevation upper bound, degrees")->capture_default_str();
    synth->add_option("--id", id, "Scene id for --spec")->default_str("scene");
    synth->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cast) {
            cmd_cast(scene, id, light_text, light_file, tau, seed, out);
        } else if (*fit) {
            cmd_fit(scene, id, config, seed, out);
        } else if (*eval) {
            cmd_eval(scene, pred_dir, out, best_of, method);
        } else if (*preview) {
            cmd_preview(scene, id, mask, out, scale, bias, feather);
        } else if (*synth) {
            cmd_synth(spec, random, seed, count, min_el, max_el, id.empty() ? "scene" : id, out);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
