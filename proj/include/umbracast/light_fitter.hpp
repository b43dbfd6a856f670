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

#include "umbracast/shadow_caster.hpp"

#include <array>
#include <vector>

namespace umbracast {

struct FitConfig {
    double azimuth_step_deg = 10.0;
    double elevation_step_deg = 5.0;
    double elevation_min_deg = 5.0;
    double elevation_max_deg = 85.0;
    double w = 0.5;       // penalty weight
    double sigma = 1.0;   // splat width, working pixels
    Dims working{64, 64};
    /// Soft occupancy R = rho^n / (rho^n + h^n), rho the splat density: with
    /// h = 0.5, R is 0.5 on the edge of a single cast layer, near 1 inside. Each surface cell
    /// deposits the working-pixel area of its cast.
    double occupancy_exponent = 8.0;
    double occupancy_half = 0.5;
    /// Exponent of the p-norm merging the lit and unlit cast layers.
    double layer_sharpness = 8.0;
    /// Upper bound on a cell's cast area, in working pixels.
    double max_footprint = 16.0;
    /// Samples per surface cell along each axis, interpolated from the point map.
    int occluder_supersample = 3;
    int max_iters = 100;
    double fd_step_deg = 0.25;
    double initial_step_deg = 2.0;
    double shrink = 0.5;
    double armijo_c = 1e-4;
    int max_halvings = 20;
    double grad_tolerance = 1e-4;
    double step_tolerance = 1e-5; // radians
    /// Above these the fit is reported unreliable.
    double max_penalty = 0.5;
    double max_dice = 0.5;
};

struct FitObjectiveValue {
    double total = 0.0;
    double dice_term = 0.0;
    double penalty_term = 0.0;
    double weight_w = 0.0;
    /// Light parallel to the receiver; total saturated at 1 + w.
    bool grazing = false;
    CastReport report;
};

/// Scene data the objective needs, prepared once per fit.
class FitProblem {
public:
    FitProblem(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
            const ReceiverPlane& plane, const PinholeModel& model, const FitConfig& config);

    FitObjectiveValue evaluate(double azimuth, double elevation) const;

    /// Soft occupancy raster at `light`.
    RealRaster occupancy(const UnitLightDirection& light) const;
    /// Binarized splat at `light`, at working resolution.
    BinaryMask hard_shadow(const UnitLightDirection& light) const;

    const FitConfig& config() const noexcept { return mConfig; }
    Dims working() const noexcept { return mWorking; }
    const RealRaster& observed() const noexcept { return mObserved; }
    /// True when the shadow mask overlaps the object, i.e. includes hidden ground.
    bool amodal() const noexcept { return mAmodal; }
    std::size_t occluder_count() const noexcept { return mSamples.size(); }

private:
    struct Rendered {
        ShadowRender render;
        CastReport report;
    };

    Rendered render(const UnitLightDirection& light) const;
    RealRaster soft_occupancy(const ShadowRender& render) const;

    FitConfig mConfig;
    std::vector<Vec3> mPixels;                 // occluder pixel points
    std::vector<std::array<int, 4>> mCells;    // corner pixels of each surface cell
    std::vector<Vec3> mCellNormal;             // toward the camera; zero for loose pixels
    std::vector<Vec3> mSamples;                // occluder samples
    std::vector<int> mParent;                  // cell of each sample
    std::vector<double> mSampleMass;           // fraction of its cell per sample
    ReceiverPlane mPlane;
    PinholeModel mModel;     // input resolution
    PinholeModel mWorkModel; // working resolution
    Dims mImage;
    Dims mWorking;
    RealRaster mObserved;    // shadow coverage fraction per working pixel
    RealRaster mWeight;      // non-object coverage per working pixel
    double mObservedMass = 0.0;
    double mHalfPower = 0.0625;
    bool mAmodal = false;
};

FitObjectiveValue fit_objective(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
        const ReceiverPlane& plane, const PinholeModel& model, double azimuth, double elevation,
        double w, double sigma);

struct SweepResult {
    LightAngles best;
    FitObjectiveValue best_value;
    std::vector<double> azimuths;   // radians
    std::vector<double> elevations; // radians
    /// objective_table[e * azimuths.size() + a]
    std::vector<double> objective_table;
    bool all_saturated = false;
};

/// Exhaustive grid; ties go to the smaller elevation, then the smaller azimuth.
SweepResult coarse_sweep(const FitProblem& problem);

struct FitResult {
    UnitLightDirection direction;
    FitObjectiveValue objective;
    LightAngles sweep_best;
    FitObjectiveValue sweep_objective;
    int refine_iterations = 0;
    bool converged = false;
    bool reliable = false;
    /// Objective of every accepted iterate, starting with the start point.
    std::vector<double> trace;
};

/// Projected gradient descent with central differences and Armijo backtracking.
FitResult refine(const FitProblem& problem, LightAngles start);

struct FitOutput {
    FitResult result;
    SweepResult sweep;
    BinaryMask induced_shadow; // binarized render at the fitted light, working resolution
};

/// Sweep then refine. Throws EmptySet when either mask is empty.
FitOutput fit_light(const FitProblem& problem);
FitOutput fit_light(const PointMap& pm, const BinaryMask& object, const BinaryMask& shadow,
        const ReceiverPlane& plane, const PinholeModel& model, const FitConfig& config = {});

} // namespace umbracast
