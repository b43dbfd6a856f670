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

/// Per-channel scale and bias; a single entry applies to every channel.
struct AffineParams {
    std::vector<double> scale{1.0};
    std::vector<double> bias{0.0};

    double scale_for(int channel) const;
    double bias_for(int channel) const;
};

/// x + m (s x + b - x), i.e. (1 - m) x + m (s x + b), per channel. `m` is a
/// single-channel raster in [0, 1].
RealRaster masked_affine(const RealRaster& x, const RealRaster& m, const AffineParams& params);

struct PreviewOptions {
    AffineParams darkening{{0.55}, {0.0}};
    double feather_sigma = 2.0; // pixels; 0 disables feathering
};

/// Gaussian blur of the mask (truncated at 3 sigma, renormalized at the borders).
RealRaster feather_mask(const BinaryMask& mask, double sigma);

/// Darkens `image` inside the feathered shadow; rounds and clamps to [0, 255].
/// Preview scales must lie in [0, 4].
Image8 render_preview(const Image8& image, const BinaryMask& shadow, const PreviewOptions& options = {});

} // namespace umbracast
