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
#include <optional>

namespace umbracast {

/// Axis-aligned box (before yaw) resting `lift` above a horizontal ground.
struct BoxSpec {
    double center_x = 0.0;
    double center_z = 2.6;
    double width = 0.6;  // along x
    double depth = 0.6;  // along z
    double height = 0.7; // along -y
    double lift = 0.0;   // gap between ground and box bottom
    double yaw = 0.0;    // radians about the vertical axis
};

struct SynthSpec {
    Dims dims{64, 64};
    PinholeModel model{80.0, 80.0, 31.5, -24.0}; // principal point above the frame: looks down at the ground
    double ground_height = 1.5; // ground plane y = ground_height
    double max_depth = 40.0;
    BoxSpec box;
    LightAngles light{0.0, 0.5};
    std::uint64_t seed = 0;
};

struct SyntheticScene {
    SynthSpec spec;
    PointMap points;
    BinaryMask object;
    /// Hard cast of the visible box surface at the truth light, rasterized on
    /// the ground plane; includes ground hidden behind the box.
    BinaryMask shadow;
    /// `shadow` minus the object.
    BinaryMask visible_shadow;
    Image8 composite; // RGB, no cast shadow
    Image8 target;    // RGB, with cast shadow
    UnitLightDirection light;
    ReceiverPlane ground;
};

/// Ray-traces the box-on-ground scene. Throws InvalidScene when the box
/// intersects the ground or the light is outside (0, 85] degrees elevation.
SyntheticScene synth_scene(const SynthSpec& spec);

/// Random box pose and light (elevation in [min_el, max_el] degrees) drawn
/// from `seed`, redrawn until the box and its whole shadow stay inside the frame.
SynthSpec random_synth_spec(std::uint64_t seed, double min_elevation_deg = 15.0,
        double max_elevation_deg = 75.0, Dims dims = {64, 64});

/// Parameter of the first hit of ray o + t d with the box, t >= 0.
std::optional<double> intersect_box(const BoxSpec& box, double ground_height, const Vec3& origin, const Vec3& dir);

} // namespace umbracast
