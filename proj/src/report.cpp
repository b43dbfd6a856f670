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

#include "umbracast/report.hpp"

#include "umbracast/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace umbracast {

const char* to_string(SceneTag tag) noexcept {
    return tag == SceneTag::Bos ? "BOS" : "BOS-free";
}

SceneTag parse_scene_tag(const std::string& text) {
    if (text == "BOS") {
        return SceneTag::Bos;
    }
    if (text == "BOS-free") {
        return SceneTag::BosFree;
    }
    throw Error(ErrorCode::InvalidScene, "unknown scene tag '" + text + "' (expected BOS or BOS-free)");
}

MetricReport evaluate_pair(const Image8& generated, const Image8& gt, const BinaryMask& pred_mask,
        const BinaryMask& gt_mask) {
    require_same_dims(generated.dims(), gt_mask.dims(), "image vs shadow mask");
    MetricReport r;
    r.grmse = rmse(generated, gt);
    r.lrmse = rmse(generated, gt, gt_mask);
    r.gssim = ssim(generated, gt);
    r.lssim = ssim(generated, gt, gt_mask);
    r.gber = ber(pred_mask, gt_mask);
    r.lber = ber(pred_mask, gt_mask, gt_mask);
    r.count = 1;
    return r;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SplitSummary summarize(const std::vector<const ItemResult*>& items) {
    SplitSummary s;
    s.scenes = items.size();
    MetricReport& m = s.metrics;
    double angle = 0.0;
    for (const ItemResult* it : items) {
        if (it->metrics) {
            m.grmse += it->metrics->grmse;
            m.lrmse += it->metrics->lrmse;
            m.gssim += it->metrics->gssim;
            m.lssim += it->metrics->lssim;
            m.gber += it->metrics->gber;
            m.lber += it->metrics->lber;
            ++m.count;
        } else {
            ++s.failures;
        }
        if (it->angular_error) {
            angle += *it->angular_error;
            ++s.with_light;
        }
    }
    if (m.count > 0) {
        const double n = double(m.count);
        m.grmse /= n;
        m.lrmse /= n;
        m.gssim /= n;
        m.lssim /= n;
        m.gber /= n;
        m.lber /= n;
    } else {
        m.grmse = m.lrmse = m.gssim = m.lssim = m.gber = m.lber = kNaN;
    }
    s.mean_angular_error = s.with_light ? angle / double(s.with_light) : kNaN;
    return s;
}

std::string fixed3(double v) {
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // no negative zero in reports
    if (std::string(buf) == "-0.000") {
        return "0.000";
    }
    return buf;
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json split_json(const SplitSummary& s) {
    return {
        {"GRMSE", number_or_null(s.metrics.grmse)},
        {"LRMSE", number_or_null(s.metrics.lrmse)},
        {"GSSIM", number_or_null(s.metrics.gssim)},
        {"LSSIM", number_or_null(s.metrics.lssim)},
        {"GBER", number_or_null(s.metrics.gber)},
        {"LBER", number_or_null(s.metrics.lber)},
        {"count", s.metrics.count},
        {"scenes", s.scenes},
        {"with_light", s.with_light},
        {"mean_angular_error", number_or_null(s.mean_angular_error)},
        {"failures", s.failures},
    };
}

} // namespace

BatchReport batch_report(const std::vector<BatchItem>& items) {
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (items[order[i]].id == items[order[i - 1]].id) {
            throw Error(ErrorCode::InvalidArgument, "batch_report: duplicate item id '" + items[order[i]].id + "'");
        }
    }

    BatchReport report;
    report.items.resize(items.size());
    parallel_for(order.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const BatchItem& in = items[order[k]];
            ItemResult& out = report.items[k];
            out.id = in.id;
            out.tag = in.tag;
            if (in.pred_light && in.gt_light) {
                out.angular_error = angular_error(*in.pred_light, *in.gt_light);
            }
            if (!in.load_error.empty()) {
                out.error = in.load_error;
                continue;
            }
            try {
                out.metrics = evaluate_pair(in.generated, in.gt, in.pred_mask, in.gt_mask);
            } catch (const Error& e) {
                out.error = e.what();
            }
        }
    });

    std::vector<const ItemResult*> bos, bos_free, all;
    for (const auto& r : report.items) {
        all.push_back(&r);
        (r.tag == SceneTag::Bos ? bos : bos_free).push_back(&r);
        report.failures += r.metrics ? 0 : 1;
    }
    report.bos = summarize(bos);
    report.bos_free = summarize(bos_free);
    report.all = summarize(all);
    return report;
}

std::string table1_csv(const BatchReport& report, const std::string& method) {
    static const char* kCols[] = {"GRMSE", "LRMSE", "GSSIM", "LSSIM", "GBER", "LBER"};
    std::string out = "method";
    for (const char* split : {"BOS", "BOS-free"}) {
        for (const char* c : kCols) {
            out += std::string(",") + split + "_" + c;
        }
    }
    out += "\n" + method;
    for (const SplitSummary* s : {&report.bos, &report.bos_free}) {
        const MetricReport& m = s->metrics;
        for (double v : {m.grmse, m.lrmse, m.gssim, m.lssim, m.gber, m.lber}) {
            out += "," + fixed3(v);
        }
    }
    return out + "\n";
}

std::string table2_csv(const BatchReport& report) {
    std::string out = "Scene,Number,With Approximate,Mean Angular Error\n";
    const std::pair<const char*, const SplitSummary*> rows[] = {
        {"BOS", &report.bos}, {"BOS-free", &report.bos_free}, {"All", &report.all}};
    for (const auto& [name, s] : rows) {
        out += std::string(name) + "," + std::to_string(s->scenes) + "," + std::to_string(s->with_light) + "," +
                fixed3(s->mean_angular_error) + "\n";
    }
    return out;
}

std::string report_json(const BatchReport& report, const std::string& method) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& r : report.items) {
        nlohmann::json j = {{"id", r.id}, {"tag", to_string(r.tag)}};
        if (r.metrics) {
            j["GRMSE"] = r.metrics->grmse;
            j["LRMSE"] = r.metrics->lrmse;
            j["GSSIM"] = r.metrics->gssim;
            j["LSSIM"] = r.metrics->lssim;
            j["GBER"] = r.metrics->gber;
            j["LBER"] = r.metrics->lber;
        }
        j["angular_error"] = r.angular_error ? nlohmann::json(*r.angular_error) : nlohmann::json(nullptr);
        if (!r.error.empty()) {
            j["error"] = r.error;
        }
        items.push_back(std::move(j));
    }
    nlohmann::json root = {
        {"method", method},
        {"splits", {{"BOS", split_json(report.bos)}, {"BOS-free", split_json(report.bos_free)},
                            {"all", split_json(report.all)}}},
        {"failures", report.failures},
        {"items", std::move(items)},
    };
    return root.dump(2) + "\n";
}

} // namespace umbracast
