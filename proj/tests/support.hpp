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

#include <cmath>
#include <numbers>
#include <random>

namespace umbracast::testing {

struct RandomScene {
    PointMap points;
    BinaryMask object;
    UnitLightDirection light;
};

// Tilted, bumpy receiver with a raised blob occluder, a few invalid pixels and
// a random light above the horizon.
inline RandomScene random_scene(std::uint64_t seed, Dims dims) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int W = dims.width, H = dims.height;
    const double f = 0.9 * W;
    const double tilt = 0.2 + 0.6 * u(rng);
    const double cx = W * (0.3 + 0.4 * u(rng)), cy = H * (0.3 + 0.4 * u(rng));
    const double r = std::max(1.5, W * (0.08 + 0.1 * u(rng)));
    const double lift = 0.2 + 0.8 * u(rng);
    std::vector<Vec3> pts(dims.area());
    std::vector<std::uint8_t> valid(dims.area(), 1);
    BinaryMask object(dims);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * W + x;
            const double rx = (x - W / 2.0) / f, ry = (y - H / 2.0) / f;
            // ground depth grows toward the top of the image
            double z = 3.0 + tilt * (H - y) / H * 3.0 + 0.05 * u(rng);
            const bool in = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
            if (in) {
                z -= lift;
                object.set(x, y, true);
            }
            pts[i] = Vec3(rx * z, ry * z, z);
            if (u(rng) < 0.03) {
                valid[i] = 0;
            }
        }
    }
    const double az = 2.0 * std::numbers::pi * u(rng);
    const double el = (10.0 + 70.0 * u(rng)) * std::numbers::pi / 180.0;
    return {PointMap(W, H, std::move(pts), std::move(valid)), std::move(object), light_from_angles(az, el)};
}

inline BinaryMask random_mask(std::mt19937_64& rng, Dims dims, double p = 0.5) {
    std::bernoulli_distribution b(p);
    BinaryMask m(dims);
    for (int y = 0; y < dims.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
            m.set(x, y, b(rng));
        }
    }
    return m;
}

inline Image8 random_image(std::mt19937_64& rng, Dims dims, int channels) {
    std::uniform_int_distribution<int> d(0, 255);
    Image8 img(dims, channels);
    for (auto& v : img.data()) {
        v = static_cast<std::uint8_t>(d(rng));
    }
    return img;
}

} // namespace umbracast::testing
