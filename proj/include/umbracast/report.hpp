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

#include "umbracast/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace umbracast {

enum class SceneTag { Bos, BosFree };

const char* to_string(SceneTag tag) noexcept;
/// "BOS" or "BOS-free"; throws InvalidScene otherwise.
SceneTag parse_scene_tag(const std::string& text);

struct MetricReport {
    double grmse = 0.0;
    double lrmse = 0.0;
    double gssim = 0.0;
    double lssim = 0.0;
    double gber = 0.0;
    double lber = 0.0;
    std::size_t count = 0;
};

/// Local metrics use the ground-truth shadow mask as the region.
MetricReport evaluate_pair(const Image8& generated, const Image8& gt, const BinaryMask& pred_mask,
        const BinaryMask& gt_mask);

struct BatchItem {
    std::string id;
    SceneTag tag = SceneTag::Bos;
    /// Set when the image part could not be loaded; the item is then counted as failed.
    std::string load_error;
    Image8 generated;
    Image8 gt;
    BinaryMask pred_mask;
    BinaryMask gt_mask;
    std::optional<UnitLightDirection> pred_light;
    std::optional<UnitLightDirection> gt_light;
};

struct ItemResult {
    std::string id;
    SceneTag tag = SceneTag::Bos;
    std::optional<MetricReport> metrics;
    std::optional<double> angular_error; // degrees
    std::string error;
};

struct SplitSummary {
    MetricReport metrics;        // count = items contributing image metrics
    std::size_t scenes = 0;      // items in the split
    std::size_t with_light = 0;  // items with both predicted and reference light
    double mean_angular_error = 0.0;
    std::size_t failures = 0;
};

struct BatchReport {
    SplitSummary bos;
    SplitSummary bos_free;
    SplitSummary all;
    std::vector<ItemResult> items; // sorted by id
    std::size_t failures = 0;
};

/// Per-item metrics in parallel, then per-split means in id order. Failing
/// items are kept in `items` with their error and excluded from the means.
/// Ids must be unique.
BatchReport batch_report(const std::vector<BatchItem>& items);

/// Columns method,BOS_GRMSE,...,BOS_LBER,BOS-free_GRMSE,...,BOS-free_LBER.
std::string table1_csv(const BatchReport& report, const std::string& method);
/// Columns Scene,Number,With Approximate,Mean Angular Error; rows BOS, BOS-free, All.
std::string table2_csv(const BatchReport& report);
std::string report_json(const BatchReport& report, const std::string& method);

} // namespace umbracast
