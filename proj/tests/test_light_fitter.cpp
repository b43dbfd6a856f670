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
#include "umbracast/metrics.hpp"
#include "umbracast/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace umbracast;

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

struct Oracle {
    SynthSpec spec;
    SyntheticScene scene;
};

Oracle oracle(double az_deg, double el_deg) {
    SynthSpec spec;
    spec.light = {deg(az_deg), deg(el_deg)};
    return {spec, synth_scene(spec)};
}

} // namespace

TEST_CASE("objective breakdown adds up") {
    const auto o = oracle(40, 35);
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, FitConfig{});
    for (double a : {0.0, 40.0, 200.0}) {
        for (double e : {10.0, 35.0, 80.0}) {
            const auto v = p.evaluate(deg(a), deg(e));
            CHECK(std::abs(v.total - (v.dice_term + v.weight_w * v.penalty_term)) < 1e-12);
            CHECK(v.dice_term >= 0.0);
            CHECK(v.dice_term <= 1.0);
            CHECK(v.penalty_term >= 0.0);
            CHECK(v.report.total() == p.occluder_count());
        }
    }
}

TEST_CASE("self-render at the truth light nearly matches") {
    const auto o = oracle(40, 35);
    const FitProblem base(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, FitConfig{});
    const BinaryMask self = base.hard_shadow(o.scene.light);
    const FitProblem p(o.scene.points, o.scene.object, self, o.scene.ground, o.spec.model, FitConfig{});
    const auto v = p.evaluate(o.scene.light.azimuth(), o.scene.light.elevation());
    CHECK(v.dice_term <= 0.05);
    CHECK(v.penalty_term == 0.0);
}

TEST_CASE("reversed light fails every cast") {
    const auto o = oracle(40, 80);
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, FitConfig{});
    const auto rev = light_from_vector(-o.scene.light.vector());
    const auto v = p.evaluate(rev.azimuth(), rev.elevation());
    CHECK(v.penalty_term == 1.0);
    CHECK(v.report.n_cast == 0);
    // nothing rendered, so the Dice term is 1
    CHECK(v.dice_term == 1.0);
    CHECK(v.total == v.dice_term + v.weight_w);
    const auto free = fit_objective(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model,
            rev.azimuth(), rev.elevation(), 0.5, 1.0);
    CHECK(free.total == v.total);
}

TEST_CASE("empty masks are rejected") {
    const auto o = oracle(40, 35);
    try {
        FitProblem(o.scene.points, o.scene.object, BinaryMask(o.spec.dims), o.scene.ground, o.spec.model, FitConfig{});
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySet);
    }
    CHECK_THROWS_AS(fit_light(o.scene.points, BinaryMask(o.spec.dims), o.scene.shadow, o.scene.ground, o.spec.model),
            Error);
}

TEST_CASE("sweep and refine recover a known light") {
    const auto o = oracle(40, 35);
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, FitConfig{});
    const auto sweep = coarse_sweep(p);
    CHECK(sweep.azimuths.size() == 36);
    CHECK(sweep.elevations.size() == 17);
    CHECK(sweep.objective_table.size() == 36 * 17);
    double da = std::abs(sweep.best.azimuth - deg(40));
    da = std::min(da, 2 * std::numbers::pi - da);
    CHECK(da <= deg(10) + 1e-12);
    CHECK(std::abs(sweep.best.elevation - deg(35)) <= deg(5) + 1e-12);

    const auto r = refine(p, sweep.best);
    CHECK(angular_error(r.direction, o.scene.light) <= 2.0);
    CHECK(r.objective.total <= sweep.best_value.total);
    REQUIRE(!r.trace.empty());
    CHECK(r.trace.front() == sweep.best_value.total);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i] <= r.trace[i - 1]);
    }

    const auto full = fit_light(p);
    CHECK(full.result.converged);
    CHECK(full.result.reliable);
    CHECK(angular_error(full.result.direction, o.scene.light) <= 2.0);
    CHECK(full.induced_shadow.dims() == p.working());
}

TEST_CASE("sweep does not depend on the worker count") {
    const auto o = oracle(130, 50);
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, FitConfig{});
    ::setenv("UMBRACAST_THREADS", "1", 1);
    const auto serial = coarse_sweep(p);
    ::setenv("UMBRACAST_THREADS", "3", 1);
    const auto three = coarse_sweep(p);
    ::unsetenv("UMBRACAST_THREADS");
    const auto any = coarse_sweep(p);
    CHECK(serial.objective_table == three.objective_table);
    CHECK(serial.objective_table == any.objective_table);
    CHECK(serial.best.azimuth == any.best.azimuth);
    CHECK(serial.best.elevation == any.best.elevation);
}

TEST_CASE("saturated sweep: tie rule, stationary refine, unconverged fit") {
    const auto o = oracle(40, 35);
    // a ceiling above the camera: every downward ray has t < 0
    const ReceiverPlane ceiling(Vec3(0, -100, 0), Vec3(0, 1, 0));
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, ceiling, o.spec.model, FitConfig{});
    const auto sweep = coarse_sweep(p);
    CHECK(sweep.all_saturated);
    CHECK(sweep.best.azimuth == 0.0);
    CHECK(sweep.best.elevation == deg(5));

    const auto r = refine(p, sweep.best);
    CHECK(r.refine_iterations == 0);
    CHECK(r.direction.azimuth() == sweep.best.azimuth);
    CHECK(r.direction.elevation() == sweep.best.elevation);

    const auto fit = fit_light(p);
    CHECK(!fit.result.converged);
    CHECK(!fit.result.reliable);
}

TEST_CASE("out-of-frame shadow is flagged") {
    // Large box close to the camera, light behind it: the shadow runs out of
    // the bottom of the frame and only a sliver remains visible.
    SynthSpec spec;
    spec.box.center_z = 2.0;
    spec.box.width = 1.2;
    spec.box.depth = 1.2;
    spec.box.height = 0.6;
    spec.light = {deg(300), deg(25)};
    const auto sc = synth_scene(spec);
    const FitProblem p(sc.points, sc.object, sc.shadow, sc.ground, spec.model, FitConfig{});
    const auto at_truth = p.evaluate(sc.light.azimuth(), sc.light.elevation());
    CHECK(at_truth.penalty_term > 0.5);
    const auto fit = fit_light(p);
    CHECK(fit.result.objective.penalty_term > 0.5);
    CHECK(!fit.result.converged);
    CHECK(!fit.result.reliable);
}

TEST_CASE("shadow equal to the object completes and is flagged") {
    const auto o = oracle(40, 35);
    const auto fit = fit_light(o.scene.points, o.scene.object, o.scene.object, o.scene.ground, o.spec.model);
    if (fit.result.objective.dice_term > 0.5) {
        CHECK(!fit.result.reliable);
    }
    CHECK(fit.result.reliable == (fit.result.converged && fit.result.objective.dice_term <= 0.5));
}

TEST_CASE("config validation") {
    const auto o = oracle(40, 35);
    FitConfig bad;
    bad.azimuth_step_deg = 0.0;
    const FitProblem p(o.scene.points, o.scene.object, o.scene.shadow, o.scene.ground, o.spec.model, bad);
    CHECK_THROWS_AS(coarse_sweep(p), Error);
}
