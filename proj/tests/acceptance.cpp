// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not configurable.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lipvessel/dataset.hpp"
#include "lipvessel/errors.hpp"
#include "lipvessel/evaluation.hpp"
#include "lipvessel/image_io.hpp"
#include "lipvessel/lip.hpp"
#include "lipvessel/probe.hpp"
#include "lipvessel/segmentation.hpp"
#include "lipvessel/vesselness.hpp"
#include "oracle.hpp"

using namespace lipvessel;
namespace fx = lipvessel::fixtures;
namespace fs = std::filesystem;

namespace {

// Reference DRIVE test-set figures and the acceptance bands around them.
constexpr double kDriveAcc = 0.9454, kDriveAccTol = 0.010;
constexpr double kDriveSe = 0.7358, kDriveSeTol = 0.030;
constexpr double kDriveSp = 0.9765, kDriveSpTol = 0.010;
constexpr double kDriveAccStdMax = 0.012;

constexpr double kRelTol = 1e-9;

struct Outcome {
    enum { kPass, kFail, kSkip } status = kPass;
    std::string detail;
};

Outcome pass(std::string detail = {}) { return {Outcome::kPass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Outcome::kFail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Outcome::kSkip, std::move(detail)}; }

bool close_rel(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// NaN patterns must agree; values must agree bitwise (tol 0) or within tol.
bool maps_match(const GrayImage& a, const GrayImage& b, double tol, std::string& why) {
    if (!a.same_size(b)) {
        why = "dimension mismatch";
        return false;
    }
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const double va = a.at(x, y), vb = b.at(x, y);
            if (std::isnan(va) != std::isnan(vb)) {
                why = "definedness differs at (" + std::to_string(x) + "," + std::to_string(y) + ")";
                return false;
            }
            if (std::isnan(va)) continue;
            const bool ok = tol == 0.0 ? va == vb : close_rel(va, vb, tol);
            if (!ok) {
                char buf[128];
                std::snprintf(buf, sizeof(buf), "values differ at (%d,%d): %.17g vs %.17g",
                              x, y, va, vb);
                why = buf;
                return false;
            }
        }
    }
    return true;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- criteria

Outcome check_lip_algebra() {
    if (lip_add(100.0, 100.0) != 160.9375) return fail("lip_add(100,100)");
    if (lip_add(128.0, 128.0) != 192.0) return fail("lip_add(128,128)");
    if (lip_sub(200.0, 100.0) != 164.10256410256412) return fail("lip_sub(200,100)");
    if (lip_sub(100.0, 200.0) != -457.14285714285717) return fail("lip_sub(100,200)");

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dist(-200.0, 255.9);
    for (int i = 0; i < 10000; ++i) {
        const double a = dist(rng), b = dist(rng), c = dist(rng);
        if (lip_add(a, b) != lip_add(b, a)) return fail("commutativity");
        if (!close_rel(lip_add(lip_add(a, b), c), lip_add(a, lip_add(b, c))))
            return fail("associativity beyond 1e-9");
        if (!close_rel(lip_sub(lip_add(a, b), b), a)) return fail("right inverse beyond 1e-9");
        if (!close_rel(lip_add(lip_sub(a, b), b), a)) return fail("left inverse beyond 1e-9");
        if (lip_add(a, 0.0) != a) return fail("neutral element");
    }
    return pass("10000 random triples within 1e-9");
}

Outcome check_detector_1d_oracle() {
    RasterProbe rp;
    rp.center = {{0, 0}};
    rp.left = {{-3, 0}};
    rp.right = {{3, 0}};
    rp.center_intensity = 100.0;
    rp.side_intensity = 10.0;

    for (uint32_t seed = 0; seed < 100; ++seed) {
        const GrayImage profile = fx::random_gray(40, 1, 0.0, 255.0, 9000 + seed);
        const GrayImage d1 = profile_detector_1d(profile, 3, 10.0, 100.0, 10.0);
        const GrayImage d2 =
            detector_map_orientation(profile, rp, 0.2, fx::full_mask(40, 1));
        std::string why;
        if (!maps_match(d1, d2, 0.0, why))
            return fail("profile seed " + std::to_string(seed) + ": " + why);
    }
    return pass("100 random profiles, bitwise");
}

Outcome check_bump_vs_transition() {
    constexpr double kEdge = 124.27184466019418;
    constexpr double kShoulder = 172.46507222353776;

    const GrayImage bump =
        fx::row_profile({50, 50, 50, 150, 150, 150, 50, 50, 50});
    const GrayImage db = profile_detector_1d(bump, 3, 10.0, 100.0, 10.0);
    for (int x = 3; x <= 5; ++x)
        if (db.at(x, 0) != 0.0) return fail("bump centre not 0");

    const GrayImage step =
        fx::row_profile({50, 50, 50, 50, 50, 50, 150, 150, 150, 150, 150, 150});
    const GrayImage ds = profile_detector_1d(step, 3, 10.0, 100.0, 10.0);
    for (int x = 6; x <= 8; ++x) {
        if (ds.at(x, 0) != kEdge) return fail("edge response changed");
        if (!(ds.at(x, 0) >= 100.0)) return fail("edge response below 100");
    }

    // Isolated bump: the response has a strict interior minimum. Plateau
    // edge: the minimum sits on the admissible boundary instead.
    const GrayImage wide =
        fx::row_profile({50, 50, 50, 50, 50, 50, 150, 150, 150, 50, 50, 50, 50, 50, 50});
    const GrayImage dw = profile_detector_1d(wide, 3, 10.0, 100.0, 10.0);
    for (int x = 3; x <= 5; ++x)
        if (dw.at(x, 0) != kShoulder) return fail("bump shoulder changed");
    for (int x = 6; x <= 8; ++x)
        if (dw.at(x, 0) != 0.0) return fail("wide bump centre not 0");
    const double interior_min = dw.at(7, 0);
    if (!(interior_min < dw.at(3, 0) && interior_min < dw.at(11, 0)))
        return fail("no strict interior minimum on the bump");

    double step_min = std::numeric_limits<double>::infinity();
    for (int x = 3; x <= 8; ++x) step_min = std::min(step_min, ds.at(x, 0));
    if (ds.at(8, 0) != step_min) return fail("step minimum not on the boundary");

    return pass("centre 0, edge " + fmt(kEdge));
}

Outcome check_brute_force_equivalence() {
    ProbeSpec a;
    a.width = 4.0;
    a.length = 3.0;
    a.center_intensity = 100.0;
    a.side_intensity = 10.0;
    ProbeSpec b = a;
    b.width = 2.8;
    b.length = 2.1;

    ProbeFamily family;
    family.probes = {a, b};
    family.orientations = orientations(4);
    DetectorParams params;
    params.orientations = family.orientations;

    for (uint32_t i = 0; i < 20; ++i) {
        const GrayImage f = fx::random_gray(24, 24, 0.0, 255.0, 500 + i);
        const BinaryMask valid = fx::random_mask(24, 24, 0.93, 700 + i);
        const VesselnessMap got = vesselness_multiscale(f, family, 2, params, valid);
        const GrayImage want =
            oracle::multiscale_map(f, valid, family.probes, 2, family.orientations, 0.2);
        std::string why;
        if (!maps_match(got.values, want, kRelTol, why))
            return fail("image " + std::to_string(i) + ": " + why);
    }
    return pass("20 random 24x24 scenes within 1e-9");
}

Outcome check_lighting_invariance() {
    PipelineParams params;
    params.adapt_intensities = false;
    params.area_fraction = 0.08;

    const BinaryMask fov = fx::disc_mask(128, 128, 63.5, 63.5, 57.0);
    for (uint32_t img = 0; img < 5; ++img) {
        const GrayImage f = fx::random_gray(128, 128, 0.0, 255.5, 300 + img);
        const SegmentationResult base = segment_vessels(f, fov, params);
        for (const double c0 : {-100.0, -20.0, 20.0, 100.0}) {
            GrayImage shifted = f;
            for (double& v : shifted.pixels()) v = lip_add(v, c0);
            const SegmentationResult res = segment_vessels(shifted, fov, params);
            if (res.probes_used != base.probes_used)
                return fail("probe count changed under shift " + fmt(c0));
            std::string why;
            if (!maps_match(res.vesselness.values, base.vesselness.values, kRelTol, why))
                return fail("vesselness drifted beyond 1e-9 under shift " + fmt(c0) + ": " + why);
            if (!(res.mask == base.mask))
                return fail("mask changed under shift " + fmt(c0));
        }
    }
    return pass("5 scenes x 4 logarithmic shifts: masks bit-identical");
}

Outcome check_rotation_equivariance() {
    ProbeSpec a;
    a.width = 4.0;
    a.length = 3.0;
    a.center_intensity = 100.0;
    a.side_intensity = 10.0;
    ProbeSpec b = a;
    b.width = 2.8;
    b.length = 2.1;

    ProbeFamily family;
    family.probes = {a, b};
    family.orientations = orientations(4);  // closed under quarter turns
    DetectorParams params;
    params.orientations = family.orientations;

    for (uint32_t i = 0; i < 10; ++i) {
        const GrayImage f = fx::random_gray(24, 24, 0.0, 255.0, 40 + i);
        const BinaryMask valid = fx::random_mask(24, 24, 0.9, 60 + i);

        const VesselnessMap straight = vesselness_multiscale(f, family, 2, params, valid);
        const VesselnessMap turned =
            vesselness_multiscale(fx::rot90(f), family, 2, params, fx::rot90(valid));
        const GrayImage expected = fx::rot90(straight.values);
        std::string why;
        if (!maps_match(turned.values, expected, 0.0, why))
            return fail("image " + std::to_string(i) + ": " + why);
    }
    return pass("cardinal orientations, bitwise under quarter turns");
}

Outcome check_pipeline_contracts() {
    const auto scene = fx::synthetic_fundus(128, 11, 2.0, 0.5, 0.1, 0.5);
    PipelineParams params;
    params.area_fraction = 0.01;

    const SegmentationResult res = segment_vessels(scene.image, scene.fov, params);
    for (std::size_t i = 0; i < res.mask.size(); ++i)
        if (res.mask.pixels()[i] && !scene.fov.pixels()[i])
            return fail("mask escapes the field of view");

    // Threshold cardinality: at least ceil(f*N) selected, ties kept.
    const auto& e = res.vesselness;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < e.values.size(); ++i)
        if (e.fov.pixels()[i] && map_defined(e.values.pixels()[i])) ++defined;
    const auto rank = static_cast<std::size_t>(
        std::ceil(params.area_fraction * static_cast<double>(defined)));
    const BinaryMask seg = threshold_by_area(e, params.area_fraction);
    const std::size_t selected = count_set(seg);
    if (selected < rank) return fail("threshold selected fewer than ceil(f*N) pixels");

    double t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < seg.size(); ++i)
        if (seg.pixels()[i]) t = std::max(t, e.values.pixels()[i]);
    std::size_t strictly_below = 0, at_most = 0;
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        if (!e.fov.pixels()[i] || !map_defined(e.values.pixels()[i])) continue;
        if (e.values.pixels()[i] < t) ++strictly_below;
        if (e.values.pixels()[i] <= t) ++at_most;
    }
    if (!(strictly_below < rank && rank <= at_most && at_most == selected))
        return fail("threshold rank inconsistent with the selected set");

    // The cleanup passes are idempotent on their own output.
    const double min_area = 2.0;
    const BinaryMask once = remove_small_components(res.mask, min_area);
    if (!(remove_small_components(once, min_area) == once))
        return fail("component filter not idempotent");
    const BinaryMask filled = fill_small_holes(res.mask);
    if (!(fill_small_holes(filled) == filled)) return fail("hole filling not idempotent");

    const SegmentationResult rerun = segment_vessels(scene.image, scene.fov, params);
    std::string why;
    if (!(rerun.mask == res.mask) ||
        !maps_match(rerun.vesselness.values, res.vesselness.values, 0.0, why))
        return fail("rerun is not bit-identical");

    return pass("FOV bound, threshold cardinality, idempotence, determinism");
}

Outcome check_synthetic_dice() {
    const auto scene = fx::synthetic_fundus(128, 3, 2.0, 0.5, 0.1, 0.5);
    PipelineParams params;
    params.area_fraction = 0.01;
    const SegmentationResult res = segment_vessels(scene.image, scene.fov, params);

    std::size_t inter = 0;
    for (std::size_t i = 0; i < res.mask.size(); ++i)
        if (res.mask.pixels()[i] && scene.vessel.pixels()[i]) ++inter;
    const double denom =
        static_cast<double>(count_set(res.mask) + count_set(scene.vessel));
    const double dice = denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(inter) / denom;
    if (!(dice > 0.7)) return fail("Dice " + fmt(dice) + " <= 0.7");
    return pass("Dice " + fmt(dice) + " against the drawn vessel");
}

Outcome check_metrics_oracle() {
    const ConfusionCounts c{4, 90, 3, 3};
    const MetricsRecord r = metrics(c);
    if (!r.se || *r.se != 4.0 / 7.0) return fail("Se");
    if (!r.sp || *r.sp != 90.0 / 93.0) return fail("Sp");
    if (r.acc != 0.94) return fail("Acc");

    std::vector<MetricsRecord> recs(3);
    recs[0].acc = 0.94;
    recs[1].acc = 0.95;
    recs[2].acc = 0.96;
    const EvalSummary s = aggregate(recs);
    if (!close_rel(s.mean_acc, 0.95, 1e-12)) return fail("mean Acc");
    if (std::abs(s.acc_std - 0.01) > 1e-12) return fail("sample std");
    return pass("Se 4/7, Sp 90/93, Acc 0.94, std 0.01");
}

Outcome check_smoke() {
    const auto scene = fx::synthetic_fundus(128, 42, 2.0, 0.5, 0.1, 0.5);
    const SegmentationResult res = segment_vessels(scene.image, std::nullopt, PipelineParams{});
    if (res.probes_used < 1 || res.probes_used > 3) return fail("probe count out of range");
    if (count_set(res.mask) == 0) return fail("empty mask");
    for (std::size_t i = 0; i < res.mask.size(); ++i)
        if (res.mask.pixels()[i] && !scene.fov.pixels()[i])
            return fail("mask escapes the detected field of view");
    return pass("defaults, " + std::to_string(res.probes_used) + " probe(s), mask in FOV");
}

std::vector<fs::path> glob_union(const fs::path& dir, const std::string& stem_pattern) {
    static const char* kExts[] = {".png", ".tif", ".tiff", ".ppm", ".jpg", ".bmp"};
    std::vector<fs::path> out;
    for (const char* ext : kExts) {
        for (auto& p : expand_glob((dir / (stem_pattern + ext)).string())) out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return out;
}

Outcome check_drive_reproduction() {
    const char* env = std::getenv("LIPVESSEL_DRIVE_DIR");
    if (!env || !*env)
        return skip(
            "set LIPVESSEL_DRIVE_DIR to the DRIVE test set (images/, fovs/, refs/ as PNG or "
            "TIFF; decode the GIF masks once, e.g. with PIL)");

    const fs::path root(env);
    // Prepared flat layout first, the distribution layout second.
    struct Candidate {
        fs::path images, fovs, refs;
    };
    const Candidate layouts[] = {
        {root / "images", root / "fovs", root / "refs"},
        {root / "test" / "images", root / "test" / "mask", root / "test" / "1st_manual"},
    };

    std::vector<fs::path> images, fovs, refs;
    for (const auto& cand : layouts) {
        images = glob_union(cand.images, "*");
        fovs = glob_union(cand.fovs, "*");
        refs = glob_union(cand.refs, "*");
        if (!images.empty() && !refs.empty()) break;
    }
    if (images.empty()) return skip("no images under " + root.string());
    if (refs.empty())
        return skip("no decodable references under " + root.string() +
                    " (convert the GIF annotations to PNG)");
    if (images.size() != refs.size() || (!fovs.empty() && fovs.size() != images.size()))
        return fail("role counts disagree: " + std::to_string(images.size()) + " images, " +
                    std::to_string(fovs.size()) + " fovs, " + std::to_string(refs.size()) +
                    " refs");

    const PipelineParams params;  // published configuration = defaults
    std::vector<MetricsRecord> records;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const ColorImage img = load_color(images[i]);
        std::optional<BinaryMask> fov;
        if (!fovs.empty()) fov = load_mask(fovs[i]);
        const SegmentationResult res = segment_vessels(img, fov, params);
        const BinaryMask ref = load_mask(refs[i]);
        const BinaryMask& scope = fov ? *fov : res.vesselness.fov;
        records.push_back(metrics(confusion(res.mask, ref, scope),
                                  images[i].stem().string()));
    }

    const EvalSummary s = aggregate(records);
    const double se = s.mean_se.value_or(0.0), sp = s.mean_sp.value_or(0.0);
    const std::string measured = "Acc " + fmt(s.mean_acc) + " (std " + fmt(s.acc_std) +
                                 "), Se " + fmt(se) + ", Sp " + fmt(sp) + " on " +
                                 std::to_string(records.size()) + " images";
    if (std::abs(s.mean_acc - kDriveAcc) > kDriveAccTol) return fail(measured + ": Acc out of band");
    if (std::abs(se - kDriveSe) > kDriveSeTol) return fail(measured + ": Se out of band");
    if (std::abs(sp - kDriveSp) > kDriveSpTol) return fail(measured + ": Sp out of band");
    if (s.acc_std > kDriveAccStdMax) return fail(measured + ": Acc std too high");
    return pass(measured);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"lip-algebra", check_lip_algebra},
        {"detector-1d-oracle", check_detector_1d_oracle},
        {"bump-vs-transition", check_bump_vs_transition},
        {"brute-force-equivalence", check_brute_force_equivalence},
        {"lighting-invariance", check_lighting_invariance},
        {"rotation-equivariance", check_rotation_equivariance},
        {"pipeline-contracts", check_pipeline_contracts},
        {"synthetic-dice", check_synthetic_dice},
        {"metrics-oracle", check_metrics_oracle},
        {"smoke", check_smoke},
        {"drive-reproduction", check_drive_reproduction},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Outcome::kPass ? "[PASS]"
                          : o.status == Outcome::kSkip ? "[SKIP]" : "[FAIL]";
        if (o.status == Outcome::kFail) ++failures;
        std::printf("%s %s%s%s\n", tag, c.name, o.detail.empty() ? "" : " - ",
                    o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
