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

#include "golden_fixtures.hpp"
#include "support.hpp"

#include "umbracast/image_io.hpp"

#include <doctest.h>

#include <random>

using namespace umbracast;

namespace {

RealRaster random_real(std::mt19937_64& rng, Dims d, int channels, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    RealRaster r(d, channels);
    for (auto& v : r.data()) {
        v = u(rng);
    }
    return r;
}

} // namespace

TEST_CASE("masked_affine examples") {
    std::mt19937_64 rng(1);
    const auto x = random_real(rng, {7, 5}, 3, -100, 100);
    const AffineParams p{{2.0, 0.5, 3.0}, {3.0, -1.0, 7.0}};
    CHECK(masked_affine(x, RealRaster({7, 5}, 1, 0.0), p) == x);
    const auto m = random_real(rng, {7, 5}, 1, 0, 1);
    CHECK(masked_affine(x, m, AffineParams{}) == x);
    CHECK(masked_affine(x, RealRaster({7, 5}, 1, 1.0), AffineParams{}) == x);

    const RealRaster one(1, 1, 1, 10.0);
    const auto out = masked_affine(one, RealRaster(1, 1, 1, 0.5), AffineParams{{2.0}, {3.0}});
    CHECK(out.at(0, 0) == 16.5);

    CHECK_THROWS_AS(masked_affine(x, RealRaster({6, 5}, 1), p), Error);
    CHECK_THROWS_AS(masked_affine(x, m, AffineParams{{1.0, 2.0}, {0.0}}), Error);
}

TEST_CASE("masked_affine is linear in x") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto x1 = random_real(rng, {6, 6}, 3, -50, 50);
        const auto x2 = random_real(rng, {6, 6}, 3, -50, 50);
        const auto m = random_real(rng, {6, 6}, 1, 0, 1);
        std::uniform_real_distribution<double> u(-2, 2);
        const AffineParams p{{u(rng) + 2.5, u(rng) + 2.5, u(rng) + 2.5}, {0.0}};
        const double a = u(rng), b = u(rng);
        RealRaster mix(x1.dims(), 3);
        for (std::size_t k = 0; k < mix.size(); ++k) {
            mix.data()[k] = a * x1.data()[k] + b * x2.data()[k];
        }
        const auto lhs = masked_affine(mix, m, p);
        const auto f1 = masked_affine(x1, m, p);
        const auto f2 = masked_affine(x2, m, p);
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            CHECK(std::abs(lhs.data()[k] - (a * f1.data()[k] + b * f2.data()[k])) < 1e-9);
        }
        // with a bias the map is affine: weights summing to one still commute
        const AffineParams pb{p.scale, {u(rng) * 10}};
        RealRaster aff(x1.dims(), 3);
        for (std::size_t k = 0; k < aff.size(); ++k) {
            aff.data()[k] = 0.3 * x1.data()[k] + 0.7 * x2.data()[k];
        }
        const auto ga = masked_affine(aff, m, pb);
        const auto g1 = masked_affine(x1, m, pb);
        const auto g2 = masked_affine(x2, m, pb);
        for (std::size_t k = 0; k < ga.size(); ++k) {
            CHECK(std::abs(ga.data()[k] - (0.3 * g1.data()[k] + 0.7 * g2.data()[k])) < 1e-9);
        }
    }
}

TEST_CASE("binary gate equals a two-branch select") {
    std::mt19937_64 rng(3);
    const auto x = random_real(rng, {9, 9}, 3, 0, 255);
    const auto bits = umbracast::testing::random_mask(rng, {9, 9});
    RealRaster m(Dims{9, 9});
    for (int y = 0; y < 9; ++y) {
        for (int xx = 0; xx < 9; ++xx) {
            m.at(xx, y) = bits.get(xx, y) ? 1.0 : 0.0;
        }
    }
    const AffineParams p{{0.55, 0.6, 0.7}, {1.0, 2.0, 3.0}};
    const auto out = masked_affine(x, m, p);
    for (int y = 0; y < 9; ++y) {
        for (int xx = 0; xx < 9; ++xx) {
            for (int c = 0; c < 3; ++c) {
                const double v = x.at(xx, y, c);
                const double want = bits.get(xx, y) ? p.scale[c] * v + p.bias[c] : v;
                CHECK(std::abs(out.at(xx, y, c) - want) < 1e-12);
                if (!bits.get(xx, y)) {
                    CHECK(out.at(xx, y, c) == v);
                }
            }
        }
    }
}

TEST_CASE("render_preview examples") {
    std::mt19937_64 rng(4);
    const auto img = umbracast::testing::random_image(rng, {20, 16}, 3);
    CHECK(render_preview(img, BinaryMask(20, 16)) == img);
    PreviewOptions black;
    black.darkening = {{0.0}, {0.0}};
    const auto out = render_preview(img, BinaryMask(20, 16, true), black);
    CHECK(out == Image8(20, 16, 3, 0));
    PreviewOptions bad;
    bad.darkening = {{4.5}, {0.0}};
    CHECK_THROWS_AS(render_preview(img, BinaryMask(20, 16, true), bad), Error);
    CHECK_THROWS_AS(render_preview(img, BinaryMask(20, 15, true)), Error);
}

TEST_CASE("feathered mask stays in [0, 1] and keeps interiors") {
    const auto m = umbracast::testing::block({32, 32}, 8, 8, 24, 24);
    const auto f = feather_mask(m, 2.0);
    for (double v : f.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(f.at(16, 16) > 0.999);
    CHECK(f.at(1, 16) == 0.0); // beyond the 3 sigma support
    CHECK(f.at(8, 16) > 0.4);
    CHECK(f.at(7, 16) < 0.6);
}

TEST_CASE("preview of the default synthetic scene matches the golden image") {
    const auto golden = read_rgb_png(std::filesystem::path(UMBRACAST_TEST_DATA) / "golden_preview.png");
    CHECK(umbracast::testing::golden_preview() == golden);
}
