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

#include "umbracast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace umbracast {

namespace {

void require_images(const Image8& a, const Image8& b, const char* what) {
    require_same_dims(a.dims(), b.dims(), what);
    if (a.channels() != b.channels()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": channel count " +
                std::to_string(a.channels()) + " vs " + std::to_string(b.channels()));
    }
}

double rmse_impl(const Image8& a, const Image8& b, const BinaryMask* region) {
    require_images(a, b, "rmse");
    if (region) {
        require_same_dims(a.dims(), region->dims(), "rmse region");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            if (region && !region->get(x, y)) {
                continue;
            }
            for (int c = 0; c < a.channels(); ++c) {
                const double d = double(a.at(x, y, c)) - double(b.at(x, y, c));
                sum += d * d;
            }
            n += static_cast<std::size_t>(a.channels());
        }
    }
    if (n == 0) {
        throw Error(region ? ErrorCode::UndefinedRegion : ErrorCode::EmptySet, "rmse: empty region");
    }
    return std::sqrt(sum / double(n));
}

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const double mid = (size - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - mid;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += w[i];
    }
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

// Valid-mode separable filter of a width x height plane.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height,
        const std::vector<double>& w) {
    const int k = static_cast<int>(w.size());
    const int ow = width - k + 1;
    const int oh = height - k + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) {
                s += w[i] * src[static_cast<std::size_t>(y) * width + x + i];
            }
            rows[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) {
                s += w[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
            }
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

double ssim_impl(const Image8& a, const Image8& b, const BinaryMask* region, const SsimOptions& o) {
    require_images(a, b, "ssim");
    if (region) {
        require_same_dims(a.dims(), region->dims(), "ssim region");
    }
    if (o.window < 1 || o.window % 2 == 0 || !(o.sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ssim: window must be odd and sigma positive");
    }
    const int W = a.width();
    const int H = a.height();
    if (W < o.window || H < o.window) {
        throw Error(ErrorCode::WindowTooSmall, "ssim: image " + to_string(a.dims()) +
                " smaller than the " + std::to_string(o.window) + "px window");
    }
    const auto w = gaussian_window(o.window, o.sigma);
    const int half = o.window / 2;
    const int ow = W - o.window + 1;
    const int oh = H - o.window + 1;
    const double c1 = (o.k1 * o.dynamic_range) * (o.k1 * o.dynamic_range);
    const double c2 = (o.k2 * o.dynamic_range) * (o.k2 * o.dynamic_range);

    std::vector<std::uint8_t> keep(static_cast<std::size_t>(ow) * oh, 1);
    std::size_t kept = keep.size();
    if (region) {
        kept = 0;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                const bool in = region->get(x + half, y + half);
                keep[static_cast<std::size_t>(y) * ow + x] = in ? 1 : 0;
                kept += in ? 1 : 0;
            }
        }
        if (kept == 0) {
            throw Error(ErrorCode::UndefinedRegion, "ssim: no window center inside the region");
        }
    }

    const std::size_t n = a.dims().area();
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    double score = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * W + x;
                pa[i] = a.at(x, y, c);
                pb[i] = b.at(x, y, c);
                paa[i] = pa[i] * pa[i];
                pbb[i] = pb[i] * pb[i];
                pab[i] = pa[i] * pb[i];
            }
        }
        const auto ma = filter_valid(pa, W, H, w);
        const auto mb = filter_valid(pb, W, H, w);
        const auto maa = filter_valid(paa, W, H, w);
        const auto mbb = filter_valid(pbb, W, H, w);
        const auto mab = filter_valid(pab, W, H, w);
        double sum = 0.0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) {
                continue;
            }
            const double va = maa[i] - ma[i] * ma[i];
            const double vb = mbb[i] - mb[i] * mb[i];
            const double cov = mab[i] - ma[i] * mb[i];
            sum += ((2.0 * ma[i] * mb[i] + c1) * (2.0 * cov + c2)) /
                    ((ma[i] * ma[i] + mb[i] * mb[i] + c1) * (va + vb + c2));
        }
        score += sum / double(kept);
    }
    return score / a.channels();
}

} // namespace

double rmse(const Image8& a, const Image8& b) { return rmse_impl(a, b, nullptr); }
double rmse(const Image8& a, const Image8& b, const BinaryMask& region) { return rmse_impl(a, b, &region); }

double ssim(const Image8& a, const Image8& b, const SsimOptions& options) {
    return ssim_impl(a, b, nullptr, options);
}
double ssim(const Image8& a, const Image8& b, const BinaryMask& region, const SsimOptions& options) {
    return ssim_impl(a, b, &region, options);
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
    return confusion(pred, gt, BinaryMask(gt.dims(), true));
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& region) {
    require_same_dims(pred.dims(), gt.dims(), "confusion");
    require_same_dims(gt.dims(), region.dims(), "confusion region");
    ConfusionCounts k;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (!region.get(x, y)) {
                continue;
            }
            const bool p = pred.get(x, y);
            if (gt.get(x, y)) {
                ++(p ? k.tp : k.fn);
            } else {
                ++(p ? k.fp : k.tn);
            }
        }
    }
    return k;
}

double ber(const ConfusionCounts& k) {
    if (k.total() == 0) {
        throw Error(ErrorCode::UndefinedRegion, "ber: empty region");
    }
    const std::size_t pos = k.tp + k.fn;
    const std::size_t neg = k.fp + k.tn;
    const double fnr = pos ? double(k.fn) / double(pos) : 0.0;
    const double fpr = neg ? double(k.fp) / double(neg) : 0.0;
    return 0.5 * (fnr + fpr);
}

double ber(const BinaryMask& pred, const BinaryMask& gt) { return ber(confusion(pred, gt)); }
double ber(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& region) {
    return ber(confusion(pred, gt, region));
}

double dice_coefficient(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a.dims(), b.dims(), "dice");
    std::size_t both = 0, na = 0, nb = 0;
    const auto ba = a.bits();
    const auto bb = b.bits();
    for (std::size_t i = 0; i < ba.size(); ++i) {
        na += ba[i];
        nb += bb[i];
        both += ba[i] & bb[i];
    }
    if (na + nb == 0) {
        return 1.0;
    }
    return 2.0 * double(both) / double(na + nb);
}

double bce(const RealRaster& pred, const BinaryMask& gt) {
    require_same_dims(pred.dims(), gt.dims(), "bce");
    if (pred.channels() != 1) {
        throw Error(ErrorCode::InvalidArgument, "bce: prediction must have one channel");
    }
    if (gt.dims().area() == 0) {
        throw Error(ErrorCode::EmptySet, "bce: empty raster");
    }
    double sum = 0.0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const double p = std::clamp(pred.at(x, y), kBceEpsilon, 1.0 - kBceEpsilon);
            sum -= gt.get(x, y) ? std::log(p) : std::log(1.0 - p);
        }
    }
    return sum / double(gt.dims().area());
}

double angular_error(const UnitLightDirection& pred, const UnitLightDirection& gt) {
    // atan2 stays accurate near 0 and 180 degrees, where acos loses digits
    const Vec3& a = pred.vector();
    const Vec3& b = gt.vector();
    return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
}

double cosine_loss(const UnitLightDirection& pred, const UnitLightDirection& gt) {
    return 1.0 - pred.vector().dot(gt.vector());
}

} // namespace umbracast
