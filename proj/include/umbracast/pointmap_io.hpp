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

#include <cstdint>
#include <filesystem>
#include <vector>

namespace umbracast {

/// UPM1 container: 8-byte magic "UPM1\0\0\0\0", u32 LE width, height, flags
/// (bit 0: validity bytes follow), then width*height*3 f32 LE xyz, then
/// optional width*height validity bytes (0/1). Nothing may follow.
inline constexpr std::uint32_t kPointMapHasValidity = 1u;

std::vector<std::uint8_t> encode_pointmap(const PointMap& pm, bool with_validity = true);
/// `source` names the input in error messages.
PointMap decode_pointmap(const std::vector<std::uint8_t>& bytes, const std::string& source = "<memory>");

PointMap read_pointmap(const std::filesystem::path& path);
void write_pointmap(const std::filesystem::path& path, const PointMap& pm, bool with_validity = true);

} // namespace umbracast
