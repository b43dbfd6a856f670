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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "golden_fixtures.hpp"
#include "support.hpp"

#include "umbracast/compositor.hpp"
#include "umbracast/image_io.hpp"
#include "umbracast/light_fitter.hpp"
#include "umbracast/metrics.hpp"
#include "umbracast/pointmap_io.hpp"
#include "umbracast/report.hpp"
#include "umbracast/scene.hpp"
#include "umbracast/shadow_caster.hpp"
#include "umbracast/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace umbracast;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    g_failures += ok ? 0 : 1;
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

// Shared by the oracle, round-trip and monotonicity checks.
struct OracleRun {
    double error_deg = 0.0;
    double seconds = 0.0;
    double roundtrip_dice = 0.0;
    bool trace_monotone = true;
};

std::vector<OracleRun> g_oracle;

void run_oracle_suite() {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto spec = random_synth_spec(seed, 15.0, 75.0);
        const auto sc = synth_scene(spec);
        const auto t0 = Clock::now();
        const auto plane = fit_receiver_plane(sc.points, sc.object, 0);
        const FitProblem problem(sc.points, sc.object, sc.shadow, plane, spec.model, FitConfig{});
        const auto fit = fit_light(problem);
        OracleRun r;
        r.seconds = seconds_since(t0);
        r.error_deg = angular_error(fit.result.direction, sc.light);
        r.roundtrip_dice = dice_coefficient(problem.hard_shadow(fit.result.direction), problem.hard_shadow(sc.light));
        const auto& tr = fit.result.trace;
        for (std::size_t i = 1; i < tr.size(); ++i) {
            r.trace_monotone = r.trace_monotone && tr[i] <= tr[i - 1];
        }
        g_oracle.push_back(r);
    }
}

void oracle_recovery() {
    int within = 0;
    std::vector<double> times;
    double worst = 0.0;
    for (const auto& r : g_oracle) {
        within += r.error_deg <= 2.0;
        times.push_back(r.seconds);
        worst = std::max(worst, r.error_deg);
    }
    std::sort(times.begin(), times.end());
    const double median = 0.5 * (times[24] + times[25]);
    const bool ok = within * 100 >= 95 * static_cast<int>(g_oracle.size()) && median <= 5.0;
    report("oracle-light-recovery", ok,
            fmt("%d/%zu within 2 deg (worst %.2f deg), median %.2f s per scene", within, g_oracle.size(), worst,
                    median));
}

void kernel_equivalence() {
    int mismatches = 0;
    for (int size : {16, 32}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto s = testing::random_scene(seed, {size, size});
            const auto a = estimate_shadow(s.points, s.object, s.light, deg(5));
            const auto b = estimate_shadow_bruteforce(s.points, s.object, s.light, deg(5));
            mismatches += !(a.mask == b.mask);
        }
    }
    // timing: 64x64, |O| <= 500, best of 3 per scene, worst over scenes
    double worst_ms = 0.0;
    int timed = 0;
    for (std::uint64_t seed = 0; timed < 10; ++seed) {
        const auto s = testing::random_scene(1000 + seed, {64, 64});
        if (s.object.count() > 500 || s.object.count() == 0) {
            continue;
        }
        double best = 1e9;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            const auto e = estimate_shadow(s.points, s.object, s.light, deg(5));
            best = std::min(best, seconds_since(t0) * 1e3);
        }
        worst_ms = std::max(worst_ms, best);
        ++timed;
    }
    report("kernel-equivalence", mismatches == 0 && worst_ms <= 50.0,
            fmt("%d/200 mismatches at 16x16 and 32x32; 64x64 kernel worst %.2f ms over %d scenes", mismatches,
                    worst_ms, timed));
}

void tau_monotonicity() {
    const double taus[] = {1, 3, 5, 10};
    std::size_t violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = testing::random_scene(500 + seed, {48, 48});
        std::vector<BinaryMask> m;
        for (double t : taus) {
            m.push_back(estimate_shadow(s.points, s.object, s.light, deg(t)).mask);
        }
        for (std::size_t k = 0; k + 1 < m.size(); ++k) {
            violations += (m[k] & ~m[k + 1]).count();
        }
    }
    report("tau-monotonicity", violations == 0, fmt("%zu nesting violations over 20 scenes", violations));
}

void geometry_exactness() {
    double worst_plane = 0.0;
    std::size_t bad_t = 0, mismatched = 0, casts = 0;
    auto check = [&](const PointMap& pm, const BinaryMask& object, const UnitLightDirection& light,
                         const ReceiverPlane& plane, const PinholeModel& model) {
        const auto r = cast_hard(pm, object, light, plane, model);
        const RayCaster caster(light, plane, model, pm.dims());
        std::size_t k = 0;
        for (const auto& x : occluder_points(pm, object)) {
            const auto c = caster.cast(x);
            if (c.status != CastStatus::Cast) {
                continue;
            }
            bad_t += !(c.t > 0.0);
            mismatched += k >= r.points.size() || !(r.points[k] == c.hit);
            ++k;
        }
        mismatched += k != r.points.size();
        for (const auto& y : r.points) {
            worst_plane = std::max(worst_plane, std::abs(plane.signed_distance(y)));
        }
        casts += r.points.size();
    };
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto spec = random_synth_spec(seed);
        const auto sc = synth_scene(spec);
        check(sc.points, sc.object, sc.light, sc.ground, spec.model);
        // tilted receiver, off-axis anchor
        const auto s = testing::random_scene(seed, {32, 32});
        check(s.points, s.object, s.light, ReceiverPlane(Vec3(0.3, 2, 5), Vec3(0.1, -1, -0.3).normalized()),
                PinholeModel{28.8, 28.8, 16, 16});
    }
    const auto hit = intersect_ray_plane(Vec3(0, 0, 1), -Vec3(0, -1, 0),
            ReceiverPlane(Vec3(0, 0.5, 1), Vec3(0, -1, 0)));
    const bool example = hit.t == 0.5 && hit.hit == Vec3(0, 0.5, 1);
    report("geometry-exactness", worst_plane <= 1e-6 && bad_t == 0 && mismatched == 0 && example && casts > 0,
            fmt("%zu casts, max |plane residual| %.2e, %zu with t <= 0, %zu not matching per-ray casts; "
                "worked example t=%.17g y=(%g, %g, %g)",
                    casts, worst_plane, bad_t, mismatched, hit.t, hit.hit.x(), hit.hit.y(), hit.hit.z()));
}

void objective_smoothness() {
    SynthSpec spec;
    spec.light = {deg(40), deg(35)};
    const auto sc = synth_scene(spec);
    const FitProblem p(sc.points, sc.object, sc.shadow, sc.ground, spec.model, FitConfig{});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = deg(0.25);
    int n = 0, bad = 0, redraws = 0;
    double worst = 0.0;
    while (n < 20) {
        const double az = deg(360 * u(rng)), el = deg(15 + 60 * u(rng)), dir = 2 * std::numbers::pi * u(rng);
        const double da = std::cos(dir), de = std::sin(dir);
        bool clean = true;
        auto f = [&](double s) {
            const auto v = p.evaluate(az + s * da, el + s * de);
            clean = clean && v.report.failed() == 0;
            return v.total;
        };
        const double d1 = (f(h) - f(-h)) / (2 * h);
        const double d2 = (f(h / 2) - f(-h / 2)) / h;
        if (!clean) { // stencil touches a failed cast: penalty steps are not smooth
            ++redraws;
            continue;
        }
        ++n;
        const double rel = std::abs(d1 - d2) / std::max({std::abs(d1), std::abs(d2), 1e-12});
        worst = std::max(worst, rel);
        bad += rel > 0.1;
    }
    bool mono = true;
    for (const auto& r : g_oracle) {
        mono = mono && r.trace_monotone;
    }
    const auto fit = fit_light(p);
    for (std::size_t i = 1; i < fit.result.trace.size(); ++i) {
        mono = mono && fit.result.trace[i] <= fit.result.trace[i - 1];
    }
    report("objective-smoothness", bad == 0 && mono,
            fmt("%d/20 directional derivatives beyond 10%% (worst %.3f, %d stencils redrawn); refine traces %s", bad,
                    worst, redraws, mono ? "non-increasing" : "INCREASING"));
}

void roundtrip_fidelity() {
    int ok = 0;
    double worst = 1.0;
    for (const auto& r : g_oracle) {
        ok += r.roundtrip_dice >= 0.9;
        worst = std::min(worst, r.roundtrip_dice);
    }
    report("round-trip-fidelity", ok == static_cast<int>(g_oracle.size()),
            fmt("%d/%zu scenes with Dice >= 0.9 (worst %.3f)", ok, g_oracle.size(), worst));
}

void metric_identities() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> side(11, 40);
    std::normal_distribution<double> gauss;
    int bad = 0;
    double worst_ssim = 0.0, worst_cos = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Dims d{side(rng), side(rng)};
        const auto img = testing::random_image(rng, d, i % 2 ? 3 : 1);
        const auto m = testing::random_mask(rng, d, 0.3);
        bad += rmse(img, img) != 0.0;
        worst_ssim = std::max(worst_ssim, std::abs(ssim(img, img) - 1.0));
        bad += ber(m, m) != 0.0;
        bad += dice_coefficient(m, m) != 1.0;
        const auto a = light_from_vector(Vec3(gauss(rng), gauss(rng), gauss(rng)));
        const auto b = light_from_vector(Vec3(gauss(rng), gauss(rng), gauss(rng)));
        const double theta = angular_error(a, b) * std::numbers::pi / 180.0;
        worst_cos = std::max(worst_cos, std::abs((1.0 - std::cos(theta)) - cosine_loss(a, b)));
    }
    // tp=1, fn=1, fp=0, tn=2
    BinaryMask gt(4, 1), pred(4, 1);
    gt.set(0, 0, true);
    gt.set(1, 0, true);
    pred.set(0, 0, true);
    const double hand = ber(pred, gt);
    const bool ok = bad == 0 && worst_ssim <= 1e-9 && worst_cos <= 1e-12 && hand == 0.25;
    report("metric-identities", ok,
            fmt("%d exact-identity failures; max |ssim-1| %.1e; max cosine gap %.1e; BER example %.17g", bad,
                    worst_ssim, worst_cos, hand));
}

RealRaster random_real(std::mt19937_64& rng, Dims d, int channels, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    RealRaster r(d, channels);
    for (auto& v : r.data()) {
        v = u(rng);
    }
    return r;
}

void gating_identities() {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int exact_fail = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Dims d{8 + i % 9, 8 + i % 7};
        const auto x1 = random_real(rng, d, 3, -300, 300);
        const auto x2 = random_real(rng, d, 3, -300, 300);
        const auto m = random_real(rng, d, 1, 0, 1);
        const AffineParams p{{u(rng) + 2, u(rng) + 2, u(rng) + 2}, {u(rng) * 20, u(rng) * 20, u(rng) * 20}};
        exact_fail += !(masked_affine(x1, RealRaster(d, 1, 0.0), p) == x1);
        exact_fail += !(masked_affine(x1, m, AffineParams{}) == x1);
        // linearity holds for the scale-only part; a bias makes the map affine
        const AffineParams lin{p.scale, {0.0}};
        const double a = u(rng), b = u(rng);
        RealRaster mix(d, 3);
        for (std::size_t k = 0; k < mix.size(); ++k) {
            mix.data()[k] = a * x1.data()[k] + b * x2.data()[k];
        }
        const auto lhs = masked_affine(mix, m, lin);
        const auto f1 = masked_affine(x1, m, lin);
        const auto f2 = masked_affine(x2, m, lin);
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            worst = std::max(worst, std::abs(lhs.data()[k] - (a * f1.data()[k] + b * f2.data()[k])));
        }
    }
    report("gating-identities", exact_fail == 0 && worst <= 1e-9,
            fmt("%d identity mismatches over 400 calls; max linearity residual %.1e", exact_fail, worst));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void report_fidelity() {
    const auto rep = batch_report(testing::golden_batch());
    const fs::path data = UMBRACAST_TEST_DATA;
    const bool t1 = table1_csv(rep, "golden") == slurp(data / "golden_table1.csv");
    const bool t2 = table2_csv(rep) == slurp(data / "golden_table2.csv");
    report("report-fidelity", t1 && t2,
            fmt("image-quality table %s golden, angular-error table %s golden", t1 ? "matches" : "DIFFERS FROM",
                    t2 ? "matches" : "DIFFERS FROM"));
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
        }
    }
    return files;
}

bool run(const std::string& cmd) {
    return std::system((cmd + " > /dev/null 2>&1").c_str()) == 0;
}

// One full CLI pass into `dir`; false on any non-zero exit.
bool cli_pass(const fs::path& dir) {
    const std::string cli = UMBRACAST_CLI;
    const std::string d = dir.string();
    bool ok = run(cli + " synth --random --seed 3 --count 2 --out " + d + "/scenes");
    ok = ok && run(cli + " cast --scene " + d + "/scenes/manifest.json --id seed3 --light 40,35 --out " + d + "/cast");
    ok = ok && run(cli + " fit-light --scene " + d + "/scenes/manifest.json --id seed3 --out " + d + "/fit");
    // predictions for every scene, so no report line carries a run-specific path
    for (const std::string id : {"seed3", "seed4"}) {
        fs::create_directories(dir / "pred" / id);
        ok = ok && run("cp " + d + "/scenes/" + id + "/composite.png " + d + "/pred/" + id + "/image.png");
        ok = ok && run("cp " + d + "/scenes/" + id + "/visible_shadow.png " + d + "/pred/" + id + "/mask.png");
    }
    ok = ok && run("cp " + d + "/fit/seed3/induced_shadow.png " + d + "/pred/seed3/mask.png");
    ok = ok && run(cli + " preview --scene " + d + "/scenes/manifest.json --id seed3 --mask " + d
            + "/scenes/seed3/visible_shadow.png --out " + d + "/preview.png");
    ok = ok && run(cli + " eval --manifest " + d + "/scenes/manifest.json --pred-dir " + d + "/pred --out " + d
            + "/eval/report");
    return ok;
}

void io_roundtrip() {
    int pm_fail = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = testing::random_scene(seed, {17 + static_cast<int>(seed), 23});
        const auto bytes = encode_pointmap(s.points, seed % 2 == 0);
        const auto back = decode_pointmap(bytes);
        pm_fail += encode_pointmap(back, seed % 2 == 0) != bytes;
        const auto tmp = fs::temp_directory_path() / fmt("umbracast_acc_%d.upm", static_cast<int>(seed));
        write_pointmap(tmp, s.points);
        const auto disk = read_pointmap(tmp);
        // the payload is float32: every coordinate must come back as its float value, bit for bit
        for (std::size_t k = 0; k < disk.points().size(); ++k) {
            for (int c = 0; c < 3; ++c) {
                const float want = static_cast<float>(s.points.points()[k][c]);
                const float got = static_cast<float>(disk.points()[k][c]);
                pm_fail += std::memcmp(&want, &got, sizeof(float)) != 0 || double(got) != disk.points()[k][c];
            }
        }
        const auto tmp2 = fs::path(tmp).replace_extension(".2.upm");
        write_pointmap(tmp2, disk);
        pm_fail += slurp(tmp) != slurp(tmp2);
        fs::remove(tmp2);
        pm_fail += !std::ranges::equal(disk.validity(), s.points.validity());
        fs::remove(tmp);
    }
    const fs::path root = fs::temp_directory_path() / "umbracast_acceptance_cli";
    fs::remove_all(root);
    const bool ran = cli_pass(root / "a") && cli_pass(root / "b");
    bool same = false;
    std::size_t nfiles = 0;
    if (ran) {
        const auto a = tree(root / "a"), b = tree(root / "b");
        nfiles = a.size();
        same = a == b && nfiles > 0;
    }
    fs::remove_all(root);
    report("io-round-trip", pm_fail == 0 && ran && same,
            fmt("%d point-map mismatches over 20 files (float32 payload); CLI %s, %zu output files %s", pm_fail,
                    ran ? "ran" : "FAILED", nfiles, same ? "byte-identical across two runs" : "DIFFER"));
}

} // namespace

int main() {
    run_oracle_suite();
    oracle_recovery();
    kernel_equivalence();
    tau_monotonicity();
    geometry_exactness();
    objective_smoothness();
    roundtrip_fidelity();
    metric_identities();
    gating_identities();
    report_fidelity();
    io_roundtrip();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
