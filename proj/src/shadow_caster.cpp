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

#include "umbracast/shadow_caster.hpp"

#include "umbracast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace umbracast {

WorkingScene downsample_scene(const PointMap& pm, const BinaryMask& object, Dims target) {
    require_same_dims(pm.dims(), object.dims(), "point map vs object mask");
    const int W = pm.width();
    const int H = pm.height();
    const int w = std::min(W, target.width);
    const int h = std::min(H, target.height);
    if (w == W && h == H) {
        return WorkingScene{pm, object};
    }

    std::vector<Vec3> points(static_cast<std::size_t>(w) * h, Vec3::Zero());
    std::vector<std::uint8_t> valid(points.size(), 0);
    BinaryMask mask(w, h);
    for (int j = 0; j < h; ++j) {
        const int y0 = j * H / h;
        const int y1 = (j + 1) * H / h;
        const int yc = (2 * j + 1) * H / (2 * h);
        for (int i = 0; i < w; ++i) {
            const int x0 = i * W / w;
            const int x1 = (i + 1) * W / w;
            const int xc = (2 * i + 1) * W / (2 * w);
            bool any = false;
            Vec3 sum = Vec3::Zero();
            int n = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    any = any || object.get(x, y);
                    if (pm.valid(x, y)) {
                        sum += pm.at(x, y);
                        ++n;
                    }
                }
            }
            const std::size_t k = static_cast<std::size_t>(j) * w + i;
            mask.set(i, j, any);
            if (pm.valid(xc, yc)) {
                valid[k] = 1;
                points[k] = sum / n;
            }
        }
    }
    return WorkingScene{PointMap(w, h, std::move(points), std::move(valid)), std::move(mask)};
}

namespace {

void check_tau(double tau) {
    if (!(tau >= 0.0 && tau < std::numbers::pi / 4.0)) {
        throw Error(ErrorCode::InvalidArgument, "estimate: tau must lie in [0, pi/4)");
    }
}

} // namespace

ShadowEstimate estimate_shadow(const PointMap& pm, const BinaryMask& object,
        const UnitLightDirection& light, double tau, Dims working) {
    check_tau(tau);
    const WorkingScene scene = downsample_scene(pm, object, working);
    const PointMap& P = scene.points;
    const Dims dims = P.dims();

    // Occluders packed contiguously for the inner loop.
    std::vector<double> ox, oy, oz;
    for (int y = 0; y < dims.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
            if (scene.object.get(x, y) && P.valid(x, y)) {
                const Vec3& o = P.at(x, y);
                ox.push_back(o.x());
                oy.push_back(o.y());
                oz.push_back(o.z());
            }
        }
    }
    if (ox.empty()) {
        throw Error(ErrorCode::EmptySet, "estimate: object mask has no valid pixels");
    }

    const Vec3 D = light.flow();
    const double dx = D.x(), dy = D.y(), dz = D.z();
    const double t = std::tan(tau);
    const double t2 = t * t;
    const std::size_t nOcc = ox.size();

    std::vector<std::uint8_t> hit(dims.area(), 0);
    parallel_for(dims.area(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const int x = static_cast<int>(k % dims.width);
            const int y = static_cast<int>(k / dims.width);
            if (!P.valid(x, y) || scene.object.get(x, y)) {
                continue;
            }
            const Vec3& r = P.at(x, y);
            const double rx = r.x(), ry = r.y(), rz = r.z();
            for (std::size_t o = 0; o < nOcc; ++o) {
                const double vx = rx - ox[o];
                const double vy = ry - oy[o];
                const double vz = rz - oz[o];
                const double p = vx * dx + vy * dy + vz * dz;
                if (!(p > 0.0)) {
                    continue;
                }
                const double q2 = (vx * vx + vy * vy + vz * vz) - p * p;
                if (q2 <= t2 * (p * p)) {
                    hit[k] = 1;
                    break;
                }
            }
        }
    });

    BinaryMask mask(dims);
    for (int y = 0; y < dims.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
            mask.set(x, y, hit[static_cast<std::size_t>(y) * dims.width + x] != 0);
        }
    }
    return ShadowEstimate{std::move(mask), dims};
}

ShadowEstimate estimate_shadow_bruteforce(const PointMap& pm, const BinaryMask& object,
        const UnitLightDirection& light, double tau, Dims working) {
    check_tau(tau);
    const WorkingScene scene = downsample_scene(pm, object, working);
    const PointMap& P = scene.points;
    const Dims dims = P.dims();
    const Vec3 D = light.flow();
    const double t = std::tan(tau);
    const double t2 = t * t;

    BinaryMask out(dims);
    bool anyObject = false;
    for (int oy = 0; oy < dims.height; ++oy) {
        for (int ox = 0; ox < dims.width; ++ox) {
            if (!scene.object.get(ox, oy) || !P.valid(ox, oy)) {
                continue;
            }
            anyObject = true;
            const Vec3& O = P.at(ox, oy);
            for (int ry = 0; ry < dims.height; ++ry) {
                for (int rx = 0; rx < dims.width; ++rx) {
                    if (!P.valid(rx, ry) || scene.object.get(rx, ry)) {
                        continue;
                    }
                    const Vec3& R = P.at(rx, ry);
                    const double v[3] = {R.x() - O.x(), R.y() - O.y(), R.z() - O.z()};
                    const double p = v[0] * D.x() + v[1] * D.y() + v[2] * D.z();
                    const double q2 = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - p * p;
                    const bool shadowed = p > 0.0 && q2 <= t2 * (p * p);
                    out.set(rx, ry, out.get(rx, ry) || shadowed);
                }
            }
        }
    }
    if (!anyObject) {
        throw Error(ErrorCode::EmptySet, "estimate: object mask has no valid pixels");
    }
    return ShadowEstimate{std::move(out), dims};
}

// ---------------------------------------------------------------------------

std::vector<Vec3> occluder_points(const PointMap& pm, const BinaryMask& object) {
    require_same_dims(pm.dims(), object.dims(), "point map vs object mask");
    std::vector<Vec3> out;
    for (int y = 0; y < pm.height(); ++y) {
        for (int x = 0; x < pm.width(); ++x) {
            if (object.get(x, y) && pm.valid(x, y)) {
                out.push_back(pm.at(x, y));
            }
        }
    }
    return out;
}

RayPlaneHit intersect_ray_plane(const Vec3& x, const Vec3& flow, const ReceiverPlane& plane) {
    const double denom = flow.dot(plane.normal());
    if (!(std::abs(denom) >= kGrazingEpsilon)) {
        throw Error(ErrorCode::GrazingLight, "ray is parallel to the receiver plane");
    }
    RayPlaneHit out;
    out.t = (plane.anchor() - x).dot(plane.normal()) / denom;
    out.hit = x + out.t * flow;
    return out;
}

RayCaster::RayCaster(const UnitLightDirection& light, const ReceiverPlane& plane, const PinholeModel& model,
        Dims image)
        : mDir(light.flow()), mNormal(plane.normal()), mAnchor(plane.anchor()), mDenom(mDir.dot(mNormal)),
          mModel(model), mImage(image) {
    if (!(std::abs(mDenom) >= kGrazingEpsilon)) {
        throw Error(ErrorCode::GrazingLight, "cast: light is parallel to the receiver plane");
    }
}

RayCast RayCaster::cast(const Vec3& x) const {
    RayCast out;
    out.t = (mAnchor - x).dot(mNormal) / mDenom;
    out.hit = x + out.t * mDir;
    if (!(out.t > 0.0)) {
        out.status = CastStatus::NegativeT;
    } else if (mDenom > 0.0) {
        out.status = CastStatus::BackFacing;
    } else if (!(out.hit.z() > 0.0) || !inside(mImage, project(mModel, out.hit))) {
        out.status = CastStatus::OffScreen;
    }
    return out;
}

CastResult cast_points(std::span<const Vec3> occluders, const UnitLightDirection& light,
        const ReceiverPlane& plane, const PinholeModel& model, Dims image) {
    const RayCaster caster(light, plane, model, image);
    CastResult out;
    out.points.reserve(occluders.size());
    for (const Vec3& x : occluders) {
        const RayCast r = caster.cast(x);
        switch (r.status) {
            case CastStatus::Cast:
                out.points.push_back(r.hit);
                ++out.report.n_cast;
                break;
            case CastStatus::NegativeT: ++out.report.n_negative_t; break;
            case CastStatus::BackFacing: ++out.report.n_backfacing; break;
            case CastStatus::OffScreen: ++out.report.n_offscreen; break;
        }
    }
    return out;
}

CastResult cast_hard(const PointMap& pm, const BinaryMask& object, const UnitLightDirection& light,
        const ReceiverPlane& plane, const PinholeModel& model) {
    const std::vector<Vec3> occ = occluder_points(pm, object);
    if (occ.empty()) {
        throw Error(ErrorCode::EmptySet, "cast: object mask has no valid pixels");
    }
    return cast_points(occ, light, plane, model, pm.dims());
}

// ---------------------------------------------------------------------------

ShadowRender soft_splat(std::span<const Vec3> points, const PinholeModel& model, Dims out, double sigma) {
    return soft_splat(points, {}, model, out, sigma);
}

ShadowRender soft_splat(std::span<const Vec3> points, std::span<const double> mass, const PinholeModel& model,
        Dims out, double sigma) {
    if (!mass.empty() && mass.size() != points.size()) {
        throw Error(ErrorCode::DimensionMismatch, "splat: one mass per point required");
    }
    if (!(sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "splat: sigma must be positive");
    }
    if (out.width < 8 || out.height < 8) {
        throw Error(ErrorCode::InvalidArgument, "splat: output must be at least 8x8");
    }
    ShadowRender render{RealRaster(out), 0.0, 0.0};
    auto& density = render.density.data();

    const double radius = 3.0 * sigma;
    const double r2max = radius * radius;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double floor = std::exp(-4.5);
    std::vector<double> weights;

    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points[i];
        const double m = mass.empty() ? 1.0 : mass[i];
        if (!(p.z() > 0.0)) {
            render.shortfall += m;
            continue;
        }
        const PixelCoord c = project(model, p);
        const int x0 = static_cast<int>(std::ceil(c.x - radius));
        const int x1 = static_cast<int>(std::floor(c.x + radius));
        const int y0 = static_cast<int>(std::ceil(c.y - radius));
        const int y1 = static_cast<int>(std::floor(c.y + radius));
        const int nx = x1 - x0 + 1;
        weights.assign(static_cast<std::size_t>(std::max(0, nx)) * std::max(0, y1 - y0 + 1), 0.0);
        double sum = 0.0;
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - c.y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - c.x;
                const double d2 = dx * dx + dy * dy;
                if (d2 < r2max) {
                    const double w = std::exp(-d2 * inv2s2) - floor;
                    weights[static_cast<std::size_t>(y - y0) * nx + (x - x0)] = w;
                    sum += w;
                }
            }
        }
        if (!(sum > 0.0)) {
            // Kernel narrower than the pixel grid: nearest cell takes the mass.
            const int x = static_cast<int>(std::lround(c.x));
            const int y = static_cast<int>(std::lround(c.y));
            if (x >= 0 && y >= 0 && x < out.width && y < out.height) {
                density[static_cast<std::size_t>(y) * out.width + x] += m;
            } else {
                render.shortfall += m;
            }
            continue;
        }
        double lost = 0.0;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double w = weights[static_cast<std::size_t>(y - y0) * nx + (x - x0)];
                if (w == 0.0) {
                    continue;
                }
                if (x >= 0 && y >= 0 && x < out.width && y < out.height) {
                    density[static_cast<std::size_t>(y) * out.width + x] += m * w / sum;
                } else {
                    lost += m * w / sum;
                }
            }
        }
        render.shortfall += lost;
    }
    for (double d : density) {
        render.total_mass += d;
    }
    return render;
}

BinaryMask binarize(const RealRaster& density, double fraction) {
    BinaryMask out(density.dims());
    double peak = 0.0;
    for (double d : density.data()) {
        peak = std::max(peak, d);
    }
    if (!(peak > 0.0)) {
        return out;
    }
    const double threshold = fraction * peak;
    for (int y = 0; y < density.height(); ++y) {
        for (int x = 0; x < density.width(); ++x) {
            out.set(x, y, density.at(x, y) >= threshold);
        }
    }
    return out;
}

} // namespace umbracast
