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

#include <stdexcept>
#include <string>

namespace umbracast {

enum class ErrorCode {
    // usage
    InvalidArgument,
    MalformedConfig,
    // data
    DimensionMismatch,
    EmptySet,
    UndefinedRegion,
    MissingFile,
    CorruptPointMap,
    CorruptImage,
    InsufficientSupport,
    InvalidScene,
    // numerical
    DegenerateElevation,
    ZeroVector,
    SingularFit,
    BehindCamera,
    GrazingLight,
    WindowTooSmall,
};

enum class ErrorCategory { Usage, Data, Numerical };

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::MalformedConfig:
            return ErrorCategory::Usage;
        case ErrorCode::DegenerateElevation:
        case ErrorCode::ZeroVector:
        case ErrorCode::SingularFit:
        case ErrorCode::BehindCamera:
        case ErrorCode::GrazingLight:
        case ErrorCode::WindowTooSmall:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Data;
    }
}

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a code; the CLI maps the
/// code's category onto its exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
            : std::runtime_error(message), mCode(code) {}

    ErrorCode code() const noexcept { return mCode; }
    ErrorCategory category() const noexcept { return category_of(mCode); }

private:
    ErrorCode mCode;
};

} // namespace umbracast
