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

#include "umbracast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <numbers>
#include <random>

namespace umbracast {

namespace {

struct BoxFrame {
    Vec3 center;
    Vec3 half;
    double c, s; // yaw rotation

    Vec3 to_local(const Vec3& p) const {
        const Vec3 d = p - center;
        return Vec3(c * d.x() + s * d.z(), d.y(), -s * d.x() + c * d.z());
    }
    Vec3 dir_to_local(const Vec3& d) const {
        return Vec3(c * d.x() + s * d.z(), d.y(), -s * d.x() + c * d.z());
    }
    Vec3 normal_to_world(const Vec3& n) const {
        return Vec3(c * n.x() - s * n.z(), n.y(), s * n.x() + c * n.z());
    }
};

BoxFrame frame_of(const BoxSpec& box, double groundY) {
    const double bottom = groundY - box.lift;
    const Vec3 center(box.center_x, bottom - 0.5 * box.height, box.center_z);
    return BoxFrame{center, Vec3(0.5 * box.width, 0.5 * box.height, 0.5 * box.depth),
            std::cos(box.yaw), std::sin(box.yaw)};
}

// Slab test in the box frame; returns entry parameter (clamped to 0 when the
// origin is inside) and the local axis of the entry face.
std::optional<std::pair<double, int>> slab(const BoxFrame& f, const Vec3& origin, const Vec3& dir) {
    const Vec3 o = f.to_local(origin);
    const Vec3 d = f.dir_to_local(dir);
    double tmin = 0.0;
    double tmax = std::numeric_limits<double>::infinity();
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (std::abs(o[a]) > f.half[a]) {
                return std::nullopt;
            }
            continue;
        }
        double t0 = (-f.half[a] - o[a]) / d[a];
        double t1 = (f.half[a] - o[a]) / d[a];
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        if (t0 > tmin) {
            tmin = t0;
            axis = a;
        }
        tmax = std::min(tmax, t1);
        if (tmin > tmax) {
            return std::nullopt;
        }
    }
    return std::make_pair(tmin, axis);
}

} // namespace

std::optional<double> intersect_box(const BoxSpec& box, double ground_height, const Vec3& origin, const Vec3& dir) {
    const auto hit = slab(frame_of(box, ground_height), origin, dir);
    if (!hit) {
        return std::nullopt;
    }
    return hit->first;
}

SyntheticScene synth_scene(const SynthSpec& spec) {
    const BoxSpec& box = spec.box;
    if (!(box.lift >= 0.0) || !(box.width > 0.0) || !(box.depth > 0.0) || !(box.height > 0.0)) {
        throw Error(ErrorCode::InvalidScene, "synth: box must have positive extents and rest on or above the ground");
    }
    if (!(spec.light.elevation > 0.0) || spec.light.elevation > deg_to_rad(85.0) + 1e-12) {
        throw Error(ErrorCode::InvalidScene, "synth: light elevation must lie in (0, 85] degrees");
    }
    if (!(spec.ground_height > 0.0)) {
        throw Error(ErrorCode::InvalidScene, "synth: ground must lie below the camera");
    }
    if (spec.box.center_z - 0.5 * std::hypot(box.width, box.depth) <= 0.0) {
        throw Error(ErrorCode::InvalidScene, "synth: box must lie in front of the camera");
    }
    if (spec.dims.width < 8 || spec.dims.height < 8) {
        throw Error(ErrorCode::InvalidArgument, "synth: image must be at least 8x8");
    }

    const Dims dims = spec.dims;
    const PinholeModel& m = spec.model;
    const UnitLightDirection light = light_from_angles(spec.light.azimuth, spec.light.elevation);
    const BoxFrame frame = frame_of(box, spec.ground_height);
    const double G = spec.ground_height;

    std::vector<Vec3> points(dims.area(), Vec3::Zero());
    std::vector<std::uint8_t> valid(dims.area(), 0);
    SyntheticScene out{spec, PointMap(), BinaryMask(dims), BinaryMask(dims), BinaryMask(dims),
            Image8(dims, 3), Image8(dims, 3), light, ReceiverPlane(Vec3(0, G, 0), Vec3(0, -1, 0))};

    const ReceiverPlane& ground = out.ground;
    const Vec3 flow = light.flow();
    const double denom = flow.dot(ground.normal());
    auto cast = [&](const Vec3& x) {
        const double t = (ground.anchor() - x).dot(ground.normal()) / denom;
        return Vec3(x + t * flow);
    };
    auto fill_triangle = [&](const PixelCoord& a, const PixelCoord& b, const PixelCoord& c) {
        const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (area == 0.0) {
            return;
        }
        const double orient = area > 0.0 ? 1.0 : -1.0;
        const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({a.x, b.x, c.x}))));
        const int x1 = std::min(dims.width - 1, static_cast<int>(std::floor(std::max({a.x, b.x, c.x}))));
        const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({a.y, b.y, c.y}))));
        const int y1 = std::min(dims.height - 1, static_cast<int>(std::floor(std::max({a.y, b.y, c.y}))));
        auto edge = [&](const PixelCoord& p, const PixelCoord& q, int x, int y) {
            return orient * ((q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x)) >= 0.0;
        };
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (edge(a, b, x, y) && edge(b, c, x, y) && edge(c, a, x, y)) {
                    out.shadow.set(x, y, true);
                }
            }
        }
    };

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> grain(-12, 12);

    const Vec3 origin = Vec3::Zero();
    for (int v = 0; v < dims.height; ++v) {
        for (int u = 0; u < dims.width; ++u) {
            const std::size_t k = static_cast<std::size_t>(v) * dims.width + u;
            const int noise = grain(rng);
            const Vec3 ray((u - m.cx) / m.fx, (v - m.cy) / m.fy, 1.0);

            std::optional<double> tGround;
            if (ray.y() > 0.0 && G / ray.y() * ray.z() <= spec.max_depth) {
                tGround = G / ray.y();
            }
            const auto boxHit = slab(frame, origin, ray);

            std::array<int, 3> rgb{120, 160, 220}; // sky
            if (boxHit && (!tGround || boxHit->first < *tGround)) {
                const Vec3 p = boxHit->first * ray;
                points[k] = p;
                valid[k] = 1;
                out.object.set(u, v, true);
                Vec3 nLocal = Vec3::Zero();
                const int axis = std::max(boxHit->second, 0);
                nLocal[axis] = frame.to_local(p)[axis] > 0.0 ? 1.0 : -1.0;
                const Vec3 normal = frame.normal_to_world(nLocal);
                const double lambert = std::max(0.0, normal.dot(light.vector()));
                const double shade = 0.35 + 0.65 * lambert;
                rgb = {static_cast<int>(190 * shade), static_cast<int>(70 * shade), static_cast<int>(55 * shade)};
            } else if (tGround) {
                const Vec3 p = *tGround * ray;
                points[k] = p;
                valid[k] = 1;
                rgb = {150 + noise, 140 + noise, 120 + noise};
            }
            for (int c = 0; c < 3; ++c) {
                out.composite.at(u, v, c) = static_cast<std::uint8_t>(std::clamp(rgb[c], 0, 255));
            }
        }
    }

    // Hard cast of the object's point samples, rasterized: the surface is
    // triangulated through the pixel samples and every cast triangle filled.
    std::vector<PixelCoord> castAt(dims.area());
    std::vector<std::uint8_t> castOk(dims.area(), 0);
    for (std::size_t k = 0; k < castAt.size(); ++k) {
        const int u = static_cast<int>(k % dims.width);
        const int v = static_cast<int>(k / dims.width);
        if (!out.object.get(u, v)) {
            continue;
        }
        const Vec3 y = cast(points[k]);
        if (y.z() > 1e-6) {
            castAt[k] = project(m, y);
            castOk[k] = 1;
        }
    }
    const std::size_t W = static_cast<std::size_t>(dims.width);
    for (int v = 0; v + 1 < dims.height; ++v) {
        for (int u = 0; u + 1 < dims.width; ++u) {
            const std::size_t k = v * W + u;
            if (!(out.object.get(u, v) && out.object.get(u + 1, v) && out.object.get(u, v + 1)
                        && out.object.get(u + 1, v + 1))) {
                continue;
            }
            if (castOk[k] && castOk[k + 1] && castOk[k + W] && castOk[k + W + 1]) {
                fill_triangle(castAt[k], castAt[k + 1], castAt[k + W + 1]);
                fill_triangle(castAt[k], castAt[k + W + 1], castAt[k + W]);
            }
        }
    }

    out.points = PointMap(dims.width, dims.height, std::move(points), std::move(valid));
    out.visible_shadow = out.shadow & ~out.object;
    out.target = out.composite;
    for (int v = 0; v < dims.height; ++v) {
        for (int u = 0; u < dims.width; ++u) {
            if (out.visible_shadow.get(u, v)) {
                for (int c = 0; c < 3; ++c) {
                    out.target.at(u, v, c) = static_cast<std::uint8_t>(std::lround(out.composite.at(u, v, c) * 0.55));
                }
            }
        }
    }
    return out;
}

SynthSpec random_synth_spec(std::uint64_t seed, double min_elevation_deg, double max_elevation_deg, Dims dims) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto lerp = [&](double a, double b) { return a + (b - a) * unit(rng); };

    for (int attempt = 0; attempt < 1000; ++attempt) {
        SynthSpec spec;
        spec.dims = dims;
        spec.model = SynthSpec{}.model.rescaled(Dims{64, 64}, dims);
        spec.seed = seed;
        spec.box.width = lerp(0.45, 0.8);
        spec.box.depth = lerp(0.45, 0.8);
        spec.box.height = lerp(0.5, 0.9);
        spec.box.center_x = lerp(-0.35, 0.35);
        spec.box.center_z = lerp(2.2, 3.0);
        spec.box.yaw = lerp(0.0, std::numbers::pi / 2.0);
        spec.light.azimuth = lerp(0.0, 2.0 * std::numbers::pi);
        spec.light.elevation = deg_to_rad(lerp(min_elevation_deg, max_elevation_deg));

        // Keep the box and its whole shadow inside the frame.
        const UnitLightDirection light = light_from_angles(spec.light.azimuth, spec.light.elevation);
        const BoxFrame f = frame_of(spec.box, spec.ground_height);
        const ReceiverPlane ground(Vec3(0, spec.ground_height, 0), Vec3(0, -1, 0));
        bool ok = true;
        for (int corner = 0; corner < 8 && ok; ++corner) {
            const Vec3 local((corner & 1 ? 1 : -1) * f.half.x(), (corner & 2 ? 1 : -1) * f.half.y(),
                    (corner & 4 ? 1 : -1) * f.half.z());
            const Vec3 world = f.center + Vec3(f.c * local.x() - f.s * local.z(), local.y(),
                    f.s * local.x() + f.c * local.z());
            const double margin = 1.0 * dims.width / 64.0;
            auto in_frame = [&](const PixelCoord& c) {
                return c.x >= margin && c.y >= margin && c.x < dims.width - 1 - margin && c.y < dims.height - 1 - margin;
            };
            if (world.z() <= 0.5 || !in_frame(project(spec.model, world))) {
                ok = false;
                break;
            }
            const double t = (ground.anchor() - world).dot(ground.normal()) / light.flow().dot(ground.normal());
            const Vec3 y = world + t * light.flow();
            if (y.z() <= 0.5) {
                ok = false;
                break;
            }
            ok = in_frame(project(spec.model, y));
        }
        if (ok) {
            return spec;
        }
    }
    throw Error(ErrorCode::InvalidScene, "synth: could not place a scene with an in-frame shadow");
}

} // namespace umbracast
