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

#include "umbracast/image_io.hpp"

#include <png.h>

#include <cstring>

namespace umbracast {

namespace {

Image8 read_png(const std::filesystem::path& path, int channels) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::MissingFile, "missing image file: " + path.string());
    }
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str())) {
        throw Error(ErrorCode::CorruptImage, "unreadable PNG " + path.string() + ": " + img.message);
    }
    img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    Image8 out(static_cast<int>(img.width), static_cast<int>(img.height), channels);
    if (!png_image_finish_read(&img, nullptr, out.data().data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw Error(ErrorCode::CorruptImage, "corrupt PNG " + path.string() + ": " + msg);
    }
    return out;
}

} // namespace

Image8 read_rgb_png(const std::filesystem::path& path) { return read_png(path, 3); }
Image8 read_gray_png(const std::filesystem::path& path) { return read_png(path, 1); }
BinaryMask read_mask_png(const std::filesystem::path& path) { return BinaryMask::from_gray(read_gray_png(path)); }

void write_png(const std::filesystem::path& path, const Image8& image) {
    if (image.channels() != 1 && image.channels() != 3) {
        throw Error(ErrorCode::InvalidArgument, "write_png: need 1 or 3 channels");
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.data().data(), 0, nullptr)) {
        throw Error(ErrorCode::MissingFile, "cannot write PNG " + path.string() + ": " + img.message);
    }
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) { write_png(path, mask.to_gray()); }

} // namespace umbracast
