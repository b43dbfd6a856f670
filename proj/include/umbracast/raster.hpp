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

#include "umbracast/error.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace umbracast {

struct Dims {
    int width = 0;
    int height = 0;

    std::size_t area() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    bool operator==(const Dims&) const = default;
};

std::string to_string(Dims d);

inline void require_same_dims(Dims a, Dims b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + to_string(a) + " vs " + to_string(b));
    }
}

/// Row-major, interleaved multi-channel raster.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels = 1, T fill = T{})
            : mDims{width, height}, mChannels(channels),
              mData(static_cast<std::size_t>(width) * height * channels, fill) {
        if (width < 0 || height < 0 || channels <= 0) {
            throw Error(ErrorCode::InvalidArgument, "raster: negative dimensions");
        }
    }
    Raster(Dims dims, int channels = 1, T fill = T{})
            : Raster(dims.width, dims.height, channels, fill) {}

    int width() const noexcept { return mDims.width; }
    int height() const noexcept { return mDims.height; }
    int channels() const noexcept { return mChannels; }
    Dims dims() const noexcept { return mDims; }
    std::size_t size() const noexcept { return mData.size(); }

    T& at(int x, int y, int c = 0) { return mData[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return mData[index(x, y, c)]; }

    std::vector<T>& data() noexcept { return mData; }
    const std::vector<T>& data() const noexcept { return mData; }

    bool operator==(const Raster&) const = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * mDims.width + x) * mChannels + c;
    }

    Dims mDims;
    int mChannels = 1;
    std::vector<T> mData;
};

using Image8 = Raster<std::uint8_t>;
using RealRaster = Raster<double>;

} // namespace umbracast
