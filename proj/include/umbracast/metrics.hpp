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

#include <cstddef>

namespace umbracast {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

struct SsimOptions {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

/// Root of the mean squared 8-bit difference; the mean runs over region
/// pixels and channels together.
double rmse(const Image8& a, const Image8& b);
double rmse(const Image8& a, const Image8& b, const BinaryMask& region);

/// Gaussian-window SSIM over all valid (fully inside) windows, averaged over
/// channels. The region variant keeps windows whose center lies in `region`.
double ssim(const Image8& a, const Image8& b, const SsimOptions& options = {});
double ssim(const Image8& a, const Image8& b, const BinaryMask& region, const SsimOptions& options = {});

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& region);

/// Balanced error rate; a class absent from gt contributes 0.
double ber(const ConfusionCounts& counts);
double ber(const BinaryMask& pred, const BinaryMask& gt);
double ber(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& region);

/// 1 when both masks are empty.
double dice_coefficient(const BinaryMask& a, const BinaryMask& b);
inline double dice_loss(const BinaryMask& a, const BinaryMask& b) { return 1.0 - dice_coefficient(a, b); }

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy with predictions clamped to [eps, 1 - eps].
double bce(const RealRaster& pred, const BinaryMask& gt);

/// Degrees.
double angular_error(const UnitLightDirection& pred, const UnitLightDirection& gt);
/// 1 - pred.gt
double cosine_loss(const UnitLightDirection& pred, const UnitLightDirection& gt);

} // namespace umbracast
