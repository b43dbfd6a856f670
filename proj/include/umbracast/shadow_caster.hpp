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

#include "umbracast/geometry.hpp"

#include <vector>

namespace umbracast {

inline constexpr Dims kWorkingDims{64, 64};

struct ShadowEstimate {
    BinaryMask mask;
    Dims resolution;
};

/// Point map and object mask reduced to the estimate's working resolution:
/// object by any-true pooling, validity by nearest sample, points by averaging
/// the valid samples of each block. Inputs no larger than `target` pass through.
struct WorkingScene {
    PointMap points;
    BinaryMask object;
};

WorkingScene downsample_scene(const PointMap& pm, const BinaryMask& object, Dims target = kWorkingDims);

/// Marks every valid non-object pixel r for which some valid object pixel o
/// satisfies p = (R - O).D > 0 and |R - O|^2 - p^2 <= tan^2(tau) p^2, with
/// D the light's flow direction. Runs at min(input, `working`) resolution.
ShadowEstimate estimate_shadow(const PointMap& pm, const BinaryMask& object,
        const UnitLightDirection& light, double tau, Dims working = kWorkingDims);

/// Reference double loop over all object/receiver pairs. Same contract as
/// estimate_shadow; intended for validation at <= 64x64.
ShadowEstimate estimate_shadow_bruteforce(const PointMap& pm, const BinaryMask& object,
        const UnitLightDirection& light, double tau, Dims working = kWorkingDims);

struct CastReport {
    std::size_t n_cast = 0;
    std::size_t n_negative_t = 0;
    std::size_t n_backfacing = 0;
    std::size_t n_offscreen = 0;

    std::size_t total() const noexcept { return n_cast + n_negative_t + n_backfacing + n_offscreen; }
    std::size_t failed() const noexcept { return n_negative_t + n_backfacing + n_offscreen; }
};

struct CastResult {
    std::vector<Vec3> points;
    CastReport report;
};

/// Below this |(-l).n| the light is treated as parallel to the receiver.
inline constexpr double kGrazingEpsilon = 1e-8;

struct RayPlaneHit {
    double t = 0.0;
    Vec3 hit = Vec3::Zero();
};

/// t = ((p0 - x).n) / (flow.n) and hit = x + t flow for the ray from x along
/// `flow`. Throws GrazingLight when |flow.n| < kGrazingEpsilon.
RayPlaneHit intersect_ray_plane(const Vec3& x, const Vec3& flow, const ReceiverPlane& plane);

enum class CastStatus { Cast, NegativeT, BackFacing, OffScreen };

struct RayCast {
    CastStatus status = CastStatus::Cast;
    double t = 0.0;
    Vec3 hit = Vec3::Zero(); // plane intersection, set whenever the ray is not parallel
};

/// Ray-plane caster for one light; throws GrazingLight on construction.
class RayCaster {
public:
    RayCaster(const UnitLightDirection& light, const ReceiverPlane& plane, const PinholeModel& model, Dims image);

    RayCast cast(const Vec3& occluder) const;

private:
    Vec3 mDir;
    Vec3 mNormal;
    Vec3 mAnchor;
    double mDenom;
    PinholeModel mModel;
    Dims mImage;
};

/// Casts each occluder along the flow direction onto the plane. A cast
/// succeeds when t > 0, the ray meets the plane's camera-facing side, and the
/// hit projects inside `image`. Throws GrazingLight.
CastResult cast_points(std::span<const Vec3> occluders, const UnitLightDirection& light,
        const ReceiverPlane& plane, const PinholeModel& model, Dims image);

/// cast_points over the valid pixels of `object`.
CastResult cast_hard(const PointMap& pm, const BinaryMask& object, const UnitLightDirection& light,
        const ReceiverPlane& plane, const PinholeModel& model);

std::vector<Vec3> occluder_points(const PointMap& pm, const BinaryMask& object);

struct ShadowRender {
    RealRaster density;
    double total_mass = 0.0;
    /// Mass of kernels that fell outside the raster.
    double shortfall = 0.0;
};

/// Deposits a unit-mass Gaussian (truncated at 3 sigma, shifted to reach zero
/// there) at each point's continuous projection.
ShadowRender soft_splat(std::span<const Vec3> points, const PinholeModel& model, Dims out, double sigma);
/// Same with per-point mass in place of unit mass.
ShadowRender soft_splat(std::span<const Vec3> points, std::span<const double> mass, const PinholeModel& model,
        Dims out, double sigma);

/// Pixels with density >= fraction * max density; empty when the render is empty.
BinaryMask binarize(const RealRaster& density, double fraction = 0.5);

} // namespace umbracast
