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

#include "umbracast/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace umbracast {

std::string to_string(Dims d) {
    return std::to_string(d.width) + "x" + std::to_string(d.height);
}

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::MalformedConfig: return "malformed-config";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::EmptySet: return "empty-set";
        case ErrorCode::UndefinedRegion: return "undefined-region";
        case ErrorCode::MissingFile: return "missing-file";
        case ErrorCode::CorruptPointMap: return "corrupt-pointmap";
        case ErrorCode::CorruptImage: return "corrupt-image";
        case ErrorCode::InsufficientSupport: return "insufficient-support";
        case ErrorCode::InvalidScene: return "invalid-scene";
        case ErrorCode::DegenerateElevation: return "degenerate-elevation";
        case ErrorCode::ZeroVector: return "zero-vector";
        case ErrorCode::SingularFit: return "singular-fit";
        case ErrorCode::BehindCamera: return "behind-camera";
        case ErrorCode::GrazingLight: return "grazing-light";
        case ErrorCode::WindowTooSmall: return "window-too-small";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

PointMap::PointMap(int width, int height, std::vector<Vec3> points, std::vector<std::uint8_t> valid)
        : mDims{width, height}, mPoints(std::move(points)), mValid(std::move(valid)) {
    if (width < 0 || height < 0 || mPoints.size() != mDims.area() || mValid.size() != mDims.area()) {
        throw Error(ErrorCode::CorruptPointMap, "point map: array sizes do not match " + to_string(mDims));
    }
    for (std::size_t i = 0; i < mPoints.size(); ++i) {
        if (!mValid[i]) {
            continue;
        }
        mValid[i] = 1;
        const Vec3& p = mPoints[i];
        if (!p.allFinite() || !(p.z() > 0.0)) {
            throw Error(ErrorCode::CorruptPointMap,
                    "point map: valid pixel " + std::to_string(i) + " is non-finite or not in front of the camera");
        }
    }
}

std::size_t PointMap::valid_count() const noexcept {
    return static_cast<std::size_t>(std::count(mValid.begin(), mValid.end(), std::uint8_t{1}));
}

BinaryMask::BinaryMask(int width, int height, bool fill)
        : mDims{width, height}, mBits(mDims.area(), fill ? 1 : 0) {}

BinaryMask BinaryMask::from_gray(const Image8& gray) {
    BinaryMask m(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y) {
        for (int x = 0; x < gray.width(); ++x) {
            m.set(x, y, gray.at(x, y, 0) >= 128);
        }
    }
    return m;
}

Image8 BinaryMask::to_gray() const {
    Image8 out(mDims);
    for (std::size_t i = 0; i < mBits.size(); ++i) {
        out.data()[i] = mBits[i] ? 255 : 0;
    }
    return out;
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(mBits.begin(), mBits.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::operator~() const {
    BinaryMask out(mDims);
    for (std::size_t i = 0; i < mBits.size(); ++i) {
        out.mBits[i] = mBits[i] ? 0 : 1;
    }
    return out;
}

BinaryMask BinaryMask::operator&(const BinaryMask& other) const {
    require_same_dims(mDims, other.mDims, "mask and");
    BinaryMask out(mDims);
    for (std::size_t i = 0; i < mBits.size(); ++i) {
        out.mBits[i] = mBits[i] & other.mBits[i];
    }
    return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& other) const {
    require_same_dims(mDims, other.mDims, "mask or");
    BinaryMask out(mDims);
    for (std::size_t i = 0; i < mBits.size(); ++i) {
        out.mBits[i] = mBits[i] | other.mBits[i];
    }
    return out;
}

// ---------------------------------------------------------------------------

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

static double wrap_azimuth(double a) {
    constexpr double twoPi = 2.0 * std::numbers::pi;
    a = std::fmod(a, twoPi);
    if (a < 0.0) {
        a += twoPi;
    }
    if (a >= twoPi) {
        a = 0.0;
    }
    return a;
}

UnitLightDirection light_from_angles(double azimuth, double elevation) {
    if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
        throw Error(ErrorCode::InvalidArgument, "light: non-finite angle");
    }
    if (!(std::abs(elevation) < std::numbers::pi / 2.0)) {
        throw Error(ErrorCode::DegenerateElevation, "light: elevation must lie strictly inside (-pi/2, pi/2)");
    }
    const double az = wrap_azimuth(azimuth);
    const double ce = std::cos(elevation);
    Vec3 v(-std::cos(az) * ce, -std::sin(elevation), -std::sin(az) * ce);
    return UnitLightDirection(LightAngles{az, elevation}, v);
}

LightAngles angles_from_vector(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorCode::ZeroVector, "light: zero or non-finite direction vector");
    }
    const Vec3 u = v / n;
    const double horizontal = std::hypot(u.x(), u.z());
    if (horizontal == 0.0) {
        throw Error(ErrorCode::DegenerateElevation, "light: vertical direction has no azimuth");
    }
    return LightAngles{wrap_azimuth(std::atan2(-u.z(), -u.x())), std::atan2(-u.y(), horizontal)};
}

UnitLightDirection light_from_vector(const Vec3& v) {
    const LightAngles a = angles_from_vector(v);
    return light_from_angles(a.azimuth, a.elevation);
}

// ---------------------------------------------------------------------------

ReceiverPlane::ReceiverPlane(Vec3 anchor, Vec3 normal, double inlier_tolerance)
        : mAnchor(std::move(anchor)), mNormal(std::move(normal)), mTolerance(inlier_tolerance) {
    const double n = mNormal.norm();
    if (!(n > 0.0) || !mNormal.allFinite() || !mAnchor.allFinite()) {
        throw Error(ErrorCode::ZeroVector, "receiver plane: invalid normal or anchor");
    }
    mNormal /= n;
    const double side = mNormal.dot(-mAnchor);
    if (side == 0.0) {
        throw Error(ErrorCode::InvalidScene, "receiver plane passes through the camera center");
    }
    if (side < 0.0) {
        mNormal = -mNormal;
    }
}

std::vector<Vec3> plane_candidates(const PointMap& pm, const BinaryMask& exclude) {
    require_same_dims(pm.dims(), exclude.dims(), "plane fit exclude mask");
    std::vector<Vec3> out;
    for (int y = pm.height() / 3; y < pm.height(); ++y) {
        for (int x = 0; x < pm.width(); ++x) {
            if (pm.valid(x, y) && !exclude.get(x, y)) {
                out.push_back(pm.at(x, y));
            }
        }
    }
    return out;
}

double inlier_fraction(const ReceiverPlane& plane, std::span<const Vec3> points) {
    if (points.empty()) {
        return 0.0;
    }
    std::size_t n = 0;
    for (const Vec3& p : points) {
        if (std::abs(plane.signed_distance(p)) <= plane.inlier_tolerance()) {
            ++n;
        }
    }
    return static_cast<double>(n) / static_cast<double>(points.size());
}

ReceiverPlane fit_receiver_plane(const PointMap& pm, const BinaryMask& exclude,
        std::uint64_t seed, const PlaneFitOptions& options) {
    const std::vector<Vec3> candidates = plane_candidates(pm, exclude);
    if (candidates.size() < options.min_candidates) {
        throw Error(ErrorCode::InsufficientSupport,
                "plane fit: " + std::to_string(candidates.size()) + " candidate points, need "
                        + std::to_string(options.min_candidates));
    }

    double zmin = std::numeric_limits<double>::infinity();
    double zmax = -zmin;
    double scale = 0.0;
    for (const Vec3& p : candidates) {
        zmin = std::min(zmin, p.z());
        zmax = std::max(zmax, p.z());
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    const double tol = std::max(options.tolerance_fraction * (zmax - zmin), 1e-9 * scale);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);

    std::size_t bestCount = 0;
    Vec3 bestNormal = Vec3::UnitY();
    Vec3 bestAnchor = candidates.front();
    for (int it = 0; it < options.iterations; ++it) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        const std::size_t k = pick(rng);
        if (i == j || j == k || i == k) {
            continue;
        }
        const Vec3& a = candidates[i];
        Vec3 n = (candidates[j] - a).cross(candidates[k] - a);
        const double len = n.norm();
        if (!(len > 1e-12 * scale * scale)) {
            continue;
        }
        n /= len;
        std::size_t count = 0;
        for (const Vec3& p : candidates) {
            if (std::abs((p - a).dot(n)) <= tol) {
                ++count;
            }
        }
        if (count > bestCount) {
            bestCount = count;
            bestNormal = n;
            bestAnchor = a;
        }
    }
    if (bestCount < 3) {
        throw Error(ErrorCode::InsufficientSupport, "plane fit: no non-degenerate hypothesis");
    }

    // Total least squares on the consensus set.
    Vec3 centroid = Vec3::Zero();
    std::vector<const Vec3*> inliers;
    inliers.reserve(bestCount);
    for (const Vec3& p : candidates) {
        if (std::abs((p - bestAnchor).dot(bestNormal)) <= tol) {
            inliers.push_back(&p);
            centroid += p;
        }
    }
    centroid /= static_cast<double>(inliers.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Vec3* p : inliers) {
        const Vec3 d = *p - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Vec3 normal = eig.eigenvectors().col(0);
    if (normal.dot(bestNormal) < 0.0) {
        normal = -normal;
    }

    ReceiverPlane plane(centroid, normal, tol);
    if (inlier_fraction(plane, candidates) < options.min_inlier_fraction) {
        throw Error(ErrorCode::InsufficientSupport, "plane fit: inlier fraction below threshold");
    }
    return plane;
}

// ---------------------------------------------------------------------------

PinholeModel PinholeModel::rescaled(Dims from, Dims to) const {
    const double sx = static_cast<double>(to.width) / from.width;
    const double sy = static_cast<double>(to.height) / from.height;
    return PinholeModel{fx * sx, fy * sy, (cx + 0.5) * sx - 0.5, (cy + 0.5) * sy - 0.5};
}

PixelCoord project(const PinholeModel& model, const Vec3& p) {
    if (!(p.z() > 0.0)) {
        throw Error(ErrorCode::BehindCamera, "project: point is not in front of the camera");
    }
    return PixelCoord{model.fx * p.x() / p.z() + model.cx, model.fy * p.y() / p.z() + model.cy};
}

namespace {

// Solves pixel * z ~ f * coord + c * z in the least-squares sense.
std::pair<double, double> fit_axis(const std::vector<Eigen::Vector3d>& samples) {
    // samples: (coord, z, pixel)
    Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (const auto& s : samples) {
        const Eigen::Vector2d row(s[0], s[1]);
        normal += row * row.transpose();
        rhs += row * (s[2] * s[1]);
    }
    const double det = normal.determinant();
    const double trace = normal.trace();
    if (!(std::abs(det) > 1e-12 * trace * trace)) {
        throw Error(ErrorCode::SingularFit, "pinhole fit: degenerate geometry");
    }
    const Eigen::Vector2d sol = normal.ldlt().solve(rhs);
    return {sol[0], sol[1]};
}

} // namespace

PinholeFit fit_pinhole(const PointMap& pm) {
    std::vector<Eigen::Vector3d> xs;
    std::vector<Eigen::Vector3d> ys;
    for (int v = 0; v < pm.height(); ++v) {
        for (int u = 0; u < pm.width(); ++u) {
            if (!pm.valid(u, v)) {
                continue;
            }
            const Vec3& p = pm.at(u, v);
            xs.emplace_back(p.x(), p.z(), u);
            ys.emplace_back(p.y(), p.z(), v);
        }
    }
    if (xs.size() < 50) {
        throw Error(ErrorCode::InsufficientSupport,
                "pinhole fit: " + std::to_string(xs.size()) + " valid points, need 50");
    }
    const auto [fx, cx] = fit_axis(xs);
    const auto [fy, cy] = fit_axis(ys);
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw Error(ErrorCode::SingularFit, "pinhole fit: non-positive focal length");
    }
    PinholeFit fit{PinholeModel{fx, fy, cx, cy}, 0.0};
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double du = fx * xs[i][0] / xs[i][1] + cx - xs[i][2];
        const double dv = fy * ys[i][0] / ys[i][1] + cy - ys[i][2];
        sum += du * du + dv * dv;
    }
    fit.rms_residual = std::sqrt(sum / static_cast<double>(xs.size()));
    return fit;
}

} // namespace umbracast
