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

#include "umbracast/pointmap_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace umbracast {

namespace {

constexpr char kMagic[8] = {'U', 'P', 'M', '1', 0, 0, 0, 0};
constexpr std::size_t kHeader = 20;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

[[noreturn]] void corrupt(const std::string& source, const std::string& what) {
    throw Error(ErrorCode::CorruptPointMap, "corrupt point map " + source + ": " + what);
}

} // namespace

std::vector<std::uint8_t> encode_pointmap(const PointMap& pm, bool with_validity) {
    const std::size_t n = pm.dims().area();
    std::vector<std::uint8_t> out(kMagic, kMagic + 8);
    out.reserve(kHeader + n * 13);
    put_u32(out, static_cast<std::uint32_t>(pm.width()));
    put_u32(out, static_cast<std::uint32_t>(pm.height()));
    put_u32(out, with_validity ? kPointMapHasValidity : 0u);
    for (const Vec3& p : pm.points()) {
        for (int k = 0; k < 3; ++k) {
            put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p[k])));
        }
    }
    if (with_validity) {
        for (std::uint8_t v : pm.validity()) {
            out.push_back(v ? 1 : 0);
        }
    }
    return out;
}

PointMap decode_pointmap(const std::vector<std::uint8_t>& bytes, const std::string& source) {
    if (bytes.size() < kHeader) {
        corrupt(source, "truncated header");
    }
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) {
        corrupt(source, "bad magic");
    }
    const std::uint32_t w = get_u32(bytes.data() + 8);
    const std::uint32_t h = get_u32(bytes.data() + 12);
    const std::uint32_t flags = get_u32(bytes.data() + 16);
    if (flags & ~kPointMapHasValidity) {
        corrupt(source, "unknown flags " + std::to_string(flags));
    }
    if (w > (1u << 16) || h > (1u << 16)) {
        corrupt(source, "implausible dimensions " + std::to_string(w) + "x" + std::to_string(h));
    }
    const std::size_t n = std::size_t(w) * h;
    const bool has_valid = flags & kPointMapHasValidity;
    const std::size_t expected = kHeader + n * 12 + (has_valid ? n : 0);
    if (bytes.size() < expected) {
        corrupt(source, "truncated payload (" + std::to_string(bytes.size()) + " of " +
                std::to_string(expected) + " bytes)");
    }
    if (bytes.size() > expected) {
        corrupt(source, "trailing bytes after payload");
    }
    std::vector<Vec3> points(n);
    std::vector<std::uint8_t> valid(n, 1);
    const std::uint8_t* p = bytes.data() + kHeader;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k, p += 4) {
            points[i][k] = std::bit_cast<float>(get_u32(p));
        }
    }
    if (has_valid) {
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] > 1) {
                corrupt(source, "validity byte other than 0/1");
            }
            valid[i] = p[i];
        }
    }
    try {
        return PointMap(static_cast<int>(w), static_cast<int>(h), std::move(points), std::move(valid));
    } catch (const Error& e) {
        corrupt(source, e.what());
    }
}

PointMap read_pointmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "missing point map file: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pointmap(bytes, path.string());
}

void write_pointmap(const std::filesystem::path& path, const PointMap& pm, bool with_validity) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto bytes = encode_pointmap(pm, with_validity);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::MissingFile, "cannot write point map " + path.string());
    }
}

} // namespace umbracast
