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

#include "umbracast/raster.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <vector>

namespace umbracast {

using Vec3 = Eigen::Vector3d;

/// Camera-centric frame: x right, y down, z forward. Pixel (u, v) has its
/// center at continuous image coordinate (u, v).
class PointMap {
public:
    PointMap() = default;
    /// Throws CorruptPointMap when a pixel flagged valid is non-finite or has z <= 0.
    PointMap(int width, int height, std::vector<Vec3> points, std::vector<std::uint8_t> valid);

    int width() const noexcept { return mDims.width; }
    int height() const noexcept { return mDims.height; }
    Dims dims() const noexcept { return mDims; }

    bool valid(int x, int y) const noexcept { return mValid[index(x, y)] != 0; }
    const Vec3& at(int x, int y) const noexcept { return mPoints[index(x, y)]; }

    std::span<const Vec3> points() const noexcept { return mPoints; }
    std::span<const std::uint8_t> validity() const noexcept { return mValid; }
    std::size_t valid_count() const noexcept;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * mDims.width + x;
    }

    Dims mDims;
    std::vector<Vec3> mPoints;
    std::vector<std::uint8_t> mValid;
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(Dims dims, bool fill = false) : BinaryMask(dims.width, dims.height, fill) {}

    /// Pixels >= 128 become true.
    static BinaryMask from_gray(const Image8& gray);
    Image8 to_gray() const;

    int width() const noexcept { return mDims.width; }
    int height() const noexcept { return mDims.height; }
    Dims dims() const noexcept { return mDims; }

    bool get(int x, int y) const noexcept { return mBits[index(x, y)] != 0; }
    void set(int x, int y, bool v) noexcept { mBits[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    std::span<const std::uint8_t> bits() const noexcept { return mBits; }

    BinaryMask operator~() const;
    BinaryMask operator&(const BinaryMask& other) const;
    BinaryMask operator|(const BinaryMask& other) const;
    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * mDims.width + x;
    }

    Dims mDims;
    std::vector<std::uint8_t> mBits;
};

struct LightAngles {
    double azimuth = 0.0;   // radians, [0, 2pi)
    double elevation = 0.0; // radians, (-pi/2, pi/2)
};

/// Direction toward a distant light source. Only constructible through
/// light_from_angles / light_from_vector, so the vector always matches the angles.
class UnitLightDirection {
public:
    double azimuth() const noexcept { return mAngles.azimuth; }
    double elevation() const noexcept { return mAngles.elevation; }
    LightAngles angles() const noexcept { return mAngles; }
    const Vec3& vector() const noexcept { return mVector; }

    /// Direction light travels, from occluder toward receiver.
    Vec3 flow() const { return -mVector; }

private:
    friend UnitLightDirection light_from_angles(double azimuth, double elevation);
    UnitLightDirection(LightAngles angles, Vec3 v) : mAngles(angles), mVector(std::move(v)) {}

    LightAngles mAngles;
    Vec3 mVector;
};

/// [-cos(az) cos(el), -sin(el), -sin(az) cos(el)]; azimuth is wrapped into [0, 2pi).
UnitLightDirection light_from_angles(double azimuth, double elevation);
LightAngles angles_from_vector(const Vec3& v);
UnitLightDirection light_from_vector(const Vec3& v);

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

class ReceiverPlane {
public:
    /// Normalizes `normal` and flips it so the camera origin is on the positive side.
    ReceiverPlane(Vec3 anchor, Vec3 normal, double inlier_tolerance = 0.0);

    const Vec3& anchor() const noexcept { return mAnchor; }
    const Vec3& normal() const noexcept { return mNormal; }
    double inlier_tolerance() const noexcept { return mTolerance; }

    double signed_distance(const Vec3& p) const { return (p - mAnchor).dot(mNormal); }

private:
    Vec3 mAnchor;
    Vec3 mNormal;
    double mTolerance;
};

struct PlaneFitOptions {
    int iterations = 500;
    double tolerance_fraction = 0.02; // of the candidates' depth range
    double min_inlier_fraction = 0.3;
    std::size_t min_candidates = 100;
};

/// RANSAC over valid pixels outside `exclude` in the lower two thirds of the
/// image, refined by total least squares on the inliers.
ReceiverPlane fit_receiver_plane(const PointMap& pm, const BinaryMask& exclude,
        std::uint64_t seed, const PlaneFitOptions& options = {});

/// Candidate pixels considered by fit_receiver_plane.
std::vector<Vec3> plane_candidates(const PointMap& pm, const BinaryMask& exclude);
double inlier_fraction(const ReceiverPlane& plane, std::span<const Vec3> points);

struct PinholeModel {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;

    /// Same camera, for a raster resampled from `from` to `to` pixels.
    PinholeModel rescaled(Dims from, Dims to) const;
};

struct PinholeFit {
    PinholeModel model;
    double rms_residual = 0.0; // pixels
};

PinholeFit fit_pinhole(const PointMap& pm);

struct PixelCoord {
    double x = 0.0;
    double y = 0.0;
};

/// Continuous projection; throws BehindCamera for z <= 0.
PixelCoord project(const PinholeModel& model, const Vec3& p);

/// Continuous coordinate lies inside the raster's pixel footprint.
inline bool inside(Dims dims, PixelCoord c) noexcept {
    return c.x >= -0.5 && c.y >= -0.5 && c.x < dims.width - 0.5 && c.y < dims.height - 0.5;
}

} // namespace umbracast
