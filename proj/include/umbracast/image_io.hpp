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

#include <filesystem>

namespace umbracast {

/// Any PNG, converted to 8-bit RGB.
Image8 read_rgb_png(const std::filesystem::path& path);
/// Any PNG, converted to 8-bit gray.
Image8 read_gray_png(const std::filesystem::path& path);
/// Gray PNG thresholded at 128.
BinaryMask read_mask_png(const std::filesystem::path& path);

/// One channel writes gray, three write RGB.
void write_png(const std::filesystem::path& path, const Image8& image);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

} // namespace umbracast
