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

#include "umbracast/light_fitter.hpp"

#include "umbracast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace umbracast {

namespace {

// Fraction of each working pixel's source block covered by `mask`.
RealRaster coverage(const BinaryMask& mask, Dims working) {
    const int W = mask.width();
    const int H = mask.height();
    RealRaster out(working);
    for (int j = 0; j < working.height; ++j) {
        const int y0 = j * H / working.height;
        const int y1 = (j + 1) * H / working.height;
        for (int i = 0; i < working.width; ++i) {
            const int x0 = i * W / working.width;
            const int x1 = (i + 1) * W / working.width;
            int n = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    n += mask.get(x, y) ? 1 : 0;
                }
            }
            out.at(i, j) = static_cast<double>(n) / ((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

} // namespace

FitProblem::FitProblem(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
        const ReceiverPlane& plane, const PinholeModel& model, const FitConfig& config)
        : mConfig(config), mPlane(plane), mModel(model), mImage(pm.dims()) {
    require_same_dims(pm.dims(), object.dims(), "point map vs object mask");
    require_same_dims(pm.dims(), shadow.dims(), "point map vs shadow mask");
    if (!(config.sigma > 0.0) || !(config.w >= 0.0) || !(config.occupancy_exponent >= 1.0) || !(config.occupancy_half > 0.0)
            || !(config.max_footprint > 0.0) || config.occluder_supersample < 1) {
        throw Error(ErrorCode::MalformedConfig,
                "fit: sigma, footprint bound and supersample must be positive, occupancy exponent at least 1, w non-negative");
    }
    if (shadow.empty()) {
        throw Error(ErrorCode::EmptySet, "fit: shadow mask is empty");
    }
    mWorking = Dims{std::min(mImage.width, config.working.width), std::min(mImage.height, config.working.height)};
    if (mWorking.width < 8 || mWorking.height < 8) {
        throw Error(ErrorCode::InvalidArgument, "fit: working resolution must be at least 8x8");
    }
    mWorkModel = model.rescaled(mImage, mWorking);
    mHalfPower = std::pow(config.occupancy_half, config.occupancy_exponent);
    mObserved = coverage(shadow, mWorking);
    // A mask that marks shadow on the object is taken as amodal and every
    // pixel counts. Otherwise ground behind the object is unobservable and
    // object pixels carry no weight.
    mAmodal = !(shadow & object).empty();
    mWeight = coverage(mAmodal ? ~BinaryMask(mImage) : ~object, mWorking);
    mObservedMass = 0.0;
    for (std::size_t k = 0; k < mObserved.size(); ++k) {
        mObserved.data()[k] *= mWeight.data()[k];
        mObservedMass += mObserved.data()[k];
    }

    auto usable = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < pm.width() && y < pm.height() && object.get(x, y) && pm.valid(x, y);
    };
    std::vector<int> index(mImage.area(), -1);
    for (int y = 0; y < mImage.height; ++y) {
        for (int x = 0; x < mImage.width; ++x) {
            if (usable(x, y)) {
                index[static_cast<std::size_t>(y) * mImage.width + x] = static_cast<int>(mPixels.size());
                mPixels.push_back(pm.at(x, y));
            }
        }
    }
    if (mPixels.empty()) {
        throw Error(ErrorCode::EmptySet, "fit: object mask has no valid pixels");
    }
    auto at = [&](int x, int y) { return index[static_cast<std::size_t>(y) * mImage.width + x]; };

    // The object surface is triangulated through its pixel samples: every
    // 2x2 block of usable pixels is a cell, sampled on a k x k bilinear grid.
    // Pixels in no cell become one-sample cells of their own.
    const int k = config.occluder_supersample;
    std::vector<std::uint8_t> covered(mPixels.size(), 0);
    for (int y = 0; y + 1 < mImage.height; ++y) {
        for (int x = 0; x + 1 < mImage.width; ++x) {
            if (!(usable(x, y) && usable(x + 1, y) && usable(x, y + 1) && usable(x + 1, y + 1))) {
                continue;
            }
            const int cell = static_cast<int>(mCells.size());
            mCells.push_back({at(x, y), at(x + 1, y), at(x, y + 1), at(x + 1, y + 1)});
            Vec3 n = (pm.at(x + 1, y + 1) - pm.at(x, y)).cross(pm.at(x, y + 1) - pm.at(x + 1, y));
            if (n.dot(pm.at(x, y)) > 0.0) {
                n = -n;
            }
            mCellNormal.push_back(n);
            for (int c : mCells.back()) {
                covered[c] = 1;
            }
            for (int sy = 0; sy < k; ++sy) {
                for (int sx = 0; sx < k; ++sx) {
                    const double ax = (sx + 0.5) / k;
                    const double ay = (sy + 0.5) / k;
                    mSamples.push_back((1 - ay) * ((1 - ax) * pm.at(x, y) + ax * pm.at(x + 1, y))
                            + ay * ((1 - ax) * pm.at(x, y + 1) + ax * pm.at(x + 1, y + 1)));
                    mParent.push_back(cell);
                    mSampleMass.push_back(1.0 / (k * k));
                }
            }
        }
    }
    for (std::size_t i = 0; i < mPixels.size(); ++i) {
        if (!covered[i]) {
            const int p = static_cast<int>(i);
            mParent.push_back(static_cast<int>(mCells.size()));
            mCells.push_back({p, p, p, p});
            mCellNormal.push_back(Vec3::Zero());
            mSamples.push_back(mPixels[i]);
            mSampleMass.push_back(1.0);
        }
    }
}

FitProblem::Rendered FitProblem::render(const UnitLightDirection& light) const {
    const RayCaster caster(light, mPlane, mModel, mImage);

    // Working-pixel area of each cell's cast; loose pixels count as one pixel.
    std::vector<PixelCoord> proj(mPixels.size());
    std::vector<std::uint8_t> ok(mPixels.size(), 0);
    for (std::size_t i = 0; i < mPixels.size(); ++i) {
        const Vec3 hit = caster.cast(mPixels[i]).hit;
        if (hit.z() > 0.0) {
            proj[i] = project(mWorkModel, hit);
            ok[i] = 1;
        }
    }
    std::vector<double> area(mCells.size(), 1.0);
    for (std::size_t c = 0; c < mCells.size(); ++c) {
        const auto [p00, p10, p01, p11] = mCells[c];
        if (p00 == p11 || !ok[p00] || !ok[p10] || !ok[p01] || !ok[p11]) {
            continue;
        }
        const double ax = proj[p11].x - proj[p00].x;
        const double ay = proj[p11].y - proj[p00].y;
        const double bx = proj[p10].x - proj[p01].x;
        const double by = proj[p10].y - proj[p01].y;
        area[c] = std::min(0.5 * std::abs(ax * by - ay * bx), mConfig.max_footprint);
    }

    // Lit and unlit cells of a convex surface each cast a single layer; the
    // two layers overlap, so they are rendered apart and merged by a smooth max.
    std::vector<std::uint8_t> unlit(mCells.size());
    for (std::size_t c = 0; c < mCells.size(); ++c) {
        unlit[c] = mCellNormal[c].dot(light.vector()) < 0.0;
    }
    Rendered out;
    std::array<std::vector<Vec3>, 2> hits;
    std::array<std::vector<double>, 2> mass;
    for (std::size_t s = 0; s < mSamples.size(); ++s) {
        const RayCast r = caster.cast(mSamples[s]);
        const int layer = unlit[mParent[s]];
        switch (r.status) {
            case CastStatus::Cast:
                ++out.report.n_cast;
                hits[layer].push_back(r.hit);
                mass[layer].push_back(mSampleMass[s] * area[mParent[s]]);
                break;
            case CastStatus::NegativeT: ++out.report.n_negative_t; break;
            case CastStatus::BackFacing: ++out.report.n_backfacing; break;
            case CastStatus::OffScreen: ++out.report.n_offscreen; break;
        }
    }
    const ShadowRender lit = soft_splat(hits[0], mass[0], mWorkModel, mWorking, mConfig.sigma);
    const ShadowRender dark = soft_splat(hits[1], mass[1], mWorkModel, mWorking, mConfig.sigma);
    out.render.density = RealRaster(mWorking);
    const double p = mConfig.layer_sharpness;
    for (std::size_t k = 0; k < out.render.density.size(); ++k) {
        const double a = lit.density.data()[k];
        const double b = dark.density.data()[k];
        const double hi = std::max(a, b);
        out.render.density.data()[k] = hi > 0.0 ? hi * std::pow(std::pow(a / hi, p) + std::pow(b / hi, p), 1.0 / p) : 0.0;
    }
    out.render.total_mass = lit.total_mass + dark.total_mass;
    out.render.shortfall = lit.shortfall + dark.shortfall;
    return out;
}

RealRaster FitProblem::soft_occupancy(const ShadowRender& render) const {
    RealRaster R(mWorking);
    for (std::size_t k = 0; k < R.size(); ++k) {
        const double r = std::pow(render.density.data()[k], mConfig.occupancy_exponent);
        R.data()[k] = r / (r + mHalfPower);
    }
    return R;
}

FitObjectiveValue FitProblem::evaluate(double azimuth, double elevation) const {
    FitObjectiveValue value;
    value.weight_w = mConfig.w;
    const UnitLightDirection light = light_from_angles(azimuth, elevation);
    Rendered rendered;
    try {
        rendered = render(light);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::GrazingLight) {
            throw;
        }
        value.grazing = true;
        value.dice_term = 1.0;
        value.penalty_term = 1.0;
        value.total = 1.0 + mConfig.w;
        value.report.n_backfacing = mSamples.size();
        return value;
    }
    value.report = rendered.report;

    const RealRaster R = soft_occupancy(rendered.render);
    double inner = 0.0;
    double mass = 0.0;
    for (std::size_t k = 0; k < R.size(); ++k) {
        inner += R.data()[k] * mObserved.data()[k];
        mass += R.data()[k] * mWeight.data()[k];
    }
    value.dice_term = 1.0 - 2.0 * inner / (mass + mObservedMass);
    value.penalty_term = static_cast<double>(rendered.report.failed()) / static_cast<double>(mSamples.size());
    value.total = value.dice_term + mConfig.w * value.penalty_term;
    return value;
}

RealRaster FitProblem::occupancy(const UnitLightDirection& light) const {
    return soft_occupancy(render(light).render);
}

BinaryMask FitProblem::hard_shadow(const UnitLightDirection& light) const {
    return binarize(render(light).render.density, 0.5);
}

FitObjectiveValue fit_objective(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
        const ReceiverPlane& plane, const PinholeModel& model, double azimuth, double elevation,
        double w, double sigma) {
    FitConfig config;
    config.w = w;
    config.sigma = sigma;
    return FitProblem(pm, object, shadow, plane, model, config).evaluate(azimuth, elevation);
}

// ---------------------------------------------------------------------------

SweepResult coarse_sweep(const FitProblem& problem) {
    const FitConfig& c = problem.config();
    if (!(c.azimuth_step_deg > 0.0) || !(c.elevation_step_deg > 0.0)) {
        throw Error(ErrorCode::MalformedConfig, "sweep: grid steps must be positive");
    }
    if (!(c.elevation_min_deg > 0.0) || c.elevation_max_deg >= 90.0 || c.elevation_min_deg > c.elevation_max_deg) {
        throw Error(ErrorCode::MalformedConfig, "sweep: elevation range must lie inside (0, 90) degrees");
    }
    SweepResult out;
    for (int i = 0;; ++i) {
        const double a = i * c.azimuth_step_deg;
        if (a >= 360.0 - 1e-9) {
            break;
        }
        out.azimuths.push_back(deg_to_rad(a));
    }
    for (int i = 0;; ++i) {
        const double e = c.elevation_min_deg + i * c.elevation_step_deg;
        if (e > c.elevation_max_deg + 1e-9) {
            break;
        }
        out.elevations.push_back(deg_to_rad(e));
    }

    const std::size_t na = out.azimuths.size();
    const std::size_t n = na * out.elevations.size();
    std::vector<FitObjectiveValue> values(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            values[k] = problem.evaluate(out.azimuths[k % na], out.elevations[k / na]);
        }
    });

    out.objective_table.resize(n);
    std::size_t best = 0;
    out.all_saturated = true;
    for (std::size_t k = 0; k < n; ++k) {
        out.objective_table[k] = values[k].total;
        if (values[k].total < values[best].total) {
            best = k;
        }
        out.all_saturated = out.all_saturated && (values[k].grazing || values[k].penalty_term >= 1.0);
    }
    out.best = LightAngles{out.azimuths[best % na], out.elevations[best / na]};
    out.best_value = values[best];
    return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Domain {
    double lo;
    double hi;

    LightAngles project(double az, double el) const {
        az = std::fmod(az, kTwoPi);
        if (az < 0.0) {
            az += kTwoPi;
        }
        return LightAngles{az, std::clamp(el, lo, hi)};
    }
};

double azimuth_delta(double from, double to) {
    double d = std::fmod(to - from, kTwoPi);
    if (d > std::numbers::pi) {
        d -= kTwoPi;
    } else if (d < -std::numbers::pi) {
        d += kTwoPi;
    }
    return d;
}

} // namespace

FitResult refine(const FitProblem& problem, LightAngles start) {
    const FitConfig& c = problem.config();
    const Domain domain{deg_to_rad(0.1), deg_to_rad(89.0)};
    const double h = deg_to_rad(c.fd_step_deg);

    LightAngles x = domain.project(start.azimuth, start.elevation);
    FitObjectiveValue fx = problem.evaluate(x.azimuth, x.elevation);

    FitResult result{light_from_angles(x.azimuth, x.elevation), fx, x, fx, 0, false, false, {fx.total}};
    bool converged = false;
    for (int iter = 0; iter < c.max_iters; ++iter) {
        const double ga = (problem.evaluate(x.azimuth + h, x.elevation).total
                                  - problem.evaluate(x.azimuth - h, x.elevation).total)
                / (2.0 * h);
        const double ge = (problem.evaluate(x.azimuth, x.elevation + h).total
                                  - problem.evaluate(x.azimuth, x.elevation - h).total)
                / (2.0 * h);
        const double gnorm = std::hypot(ga, ge);
        if (gnorm < c.grad_tolerance) {
            converged = true;
            break;
        }

        double alpha = deg_to_rad(c.initial_step_deg);
        bool accepted = false;
        LightAngles next = x;
        FitObjectiveValue fnext;
        double moved = 0.0;
        for (int k = 0; k <= c.max_halvings; ++k, alpha *= c.shrink) {
            next = domain.project(x.azimuth - alpha * ga / gnorm, x.elevation - alpha * ge / gnorm);
            const double da = azimuth_delta(x.azimuth, next.azimuth);
            const double de = next.elevation - x.elevation;
            fnext = problem.evaluate(next.azimuth, next.elevation);
            const double decrease = -(ga * da + ge * de);
            if (fnext.total <= fx.total - c.armijo_c * decrease && fnext.total <= fx.total) {
                accepted = true;
                moved = std::hypot(da, de);
                break;
            }
        }
        if (!accepted) {
            converged = true; // no descent above the step tolerance
            break;
        }
        x = next;
        fx = fnext;
        ++result.refine_iterations;
        result.trace.push_back(fx.total);
        if (moved < c.step_tolerance) {
            converged = true;
            break;
        }
    }
    result.direction = light_from_angles(x.azimuth, x.elevation);
    result.objective = fx;
    result.converged = converged;
    result.reliable = converged;
    return result;
}

FitOutput fit_light(const FitProblem& problem) {
    const FitConfig& c = problem.config();
    SweepResult sweep = coarse_sweep(problem);
    FitResult result = refine(problem, sweep.best);
    result.sweep_best = sweep.best;
    result.sweep_objective = sweep.best_value;
    result.converged = result.converged && !sweep.all_saturated && !result.objective.grazing
            && result.objective.penalty_term <= c.max_penalty;
    result.reliable = result.converged && result.objective.dice_term <= c.max_dice;
    BinaryMask induced = result.objective.grazing ? BinaryMask(problem.working()) : problem.hard_shadow(result.direction);
    return FitOutput{std::move(result), std::move(sweep), std::move(induced)};
}

FitOutput fit_light(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
        const ReceiverPlane& plane, const PinholeModel& model, const FitConfig& config) {
    return fit_light(FitProblem(pm, object, shadow, plane, model, config));
}

} // namespace umbracast
