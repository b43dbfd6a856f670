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

#include <algorithm>
#include <cmath>

namespace umbracast {

namespace {

double pick(const std::vector<double>& v, int channel, const char* what) {
    if (v.empty()) {
        throw Error(ErrorCode::InvalidArgument, std::string("affine params: empty ") + what);
    }
    if (v.size() == 1) {
        return v[0];
    }
    if (channel >= static_cast<int>(v.size())) {
        throw Error(ErrorCode::DimensionMismatch, std::string("affine params: no ") + what + " for channel " +
                std::to_string(channel));
    }
    return v[static_cast<std::size_t>(channel)];
}

void check_finite(const AffineParams& p) {
    for (const auto* v : {&p.scale, &p.bias}) {
        for (double x : *v) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::InvalidArgument, "affine params must be finite");
            }
        }
    }
}

} // namespace

double AffineParams::scale_for(int channel) const { return pick(scale, channel, "scale"); }
double AffineParams::bias_for(int channel) const { return pick(bias, channel, "bias"); }

RealRaster masked_affine(const RealRaster& x, const RealRaster& m, const AffineParams& params) {
    require_same_dims(x.dims(), m.dims(), "masked_affine");
    if (m.channels() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "masked_affine: mask must have one channel");
    }
    check_finite(params);
    const int C = x.channels();
    std::vector<double> s(C), b(C);
    for (int c = 0; c < C; ++c) {
        s[c] = params.scale_for(c);
        b[c] = params.bias_for(c);
    }
    RealRaster out(x.dims(), C);
    for (int y = 0; y < x.height(); ++y) {
        for (int px = 0; px < x.width(); ++px) {
            const double g = m.at(px, y);
            for (int c = 0; c < C; ++c) {
                const double v = x.at(px, y, c);
                out.at(px, y, c) = v + g * ((s[c] * v + b[c]) - v);
            }
        }
    }
    return out;
}

RealRaster feather_mask(const BinaryMask& mask, double sigma) {
    RealRaster hard(mask.dims());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            hard.at(x, y) = mask.get(x, y) ? 1.0 : 0.0;
        }
    }
    if (!(sigma > 0.0)) {
        return hard;
    }
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * r + 1);
    for (int i = -r; i <= r; ++i) {
        w[i + r] = std::exp(-double(i * i) / (2.0 * sigma * sigma));
    }
    const int W = mask.width();
    const int H = mask.height();
    auto pass = [&](const RealRaster& src, bool horizontal) {
        RealRaster dst(src.dims());
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double s = 0.0, n = 0.0;
                for (int i = -r; i <= r; ++i) {
                    const int xx = horizontal ? x + i : x;
                    const int yy = horizontal ? y : y + i;
                    if (xx < 0 || yy < 0 || xx >= W || yy >= H) {
                        continue;
                    }
                    s += w[i + r] * src.at(xx, yy);
                    n += w[i + r];
                }
                dst.at(x, y) = s / n;
            }
        }
        return dst;
    };
    return pass(pass(hard, true), false);
}

Image8 render_preview(const Image8& image, const BinaryMask& shadow, const PreviewOptions& options) {
    require_same_dims(image.dims(), shadow.dims(), "render_preview");
    for (double s : options.darkening.scale) {
        if (!(s >= 0.0 && s <= 4.0)) {
            throw Error(ErrorCode::InvalidArgument, "preview scale must lie in [0, 4]");
        }
    }
    RealRaster x(image.dims(), image.channels());
    std::copy(image.data().begin(), image.data().end(), x.data().begin());
    const RealRaster out = masked_affine(x, feather_mask(shadow, options.feather_sigma), options.darkening);
    Image8 result(image.dims(), image.channels());
    for (std::size_t i = 0; i < out.size(); ++i) {
        result.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(out.data()[i]), 0L, 255L));
    }
    return result;
}

} // namespace umbracast
