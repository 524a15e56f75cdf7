#include "lipvessel/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipvessel/lip.hpp"

namespace lipvessel {

namespace {

// Round half away from zero; the raster must be odd under negation.
int iround(double v) { return static_cast<int>(std::lround(v)); }

Offset side_translation(double width, double theta) {
    const double half = width / 2.0;
    return {iround(half * -std::sin(theta)), iround(half * std::cos(theta))};
}

std::vector<Offset> translate(const std::vector<Offset>& pts, Offset t) {
    std::vector<Offset> out;
    out.reserve(pts.size());
    for (auto p : pts) out.push_back({p.dx + t.dx, p.dy + t.dy});
    return out;
}

}  // namespace

std::vector<Offset> digital_line(int ex, int ey) {
    const int n = std::max(std::abs(ex), std::abs(ey));
    std::vector<Offset> pts;
    pts.reserve(n + 1);
    if (n == 0) {
        pts.push_back({0, 0});
        return pts;
    }
    for (int t = 0; t <= n; ++t) {
        pts.push_back({iround(static_cast<double>(t) * ex / n),
                       iround(static_cast<double>(t) * ey / n)});
    }
    // One point per major-axis step, but honour the no-duplicates contract.
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::array<double, 3> probe_widths(double fov_diameter_px, double fov_angle_deg) {
    if (fov_diameter_px <= 0.0 || fov_angle_deg <= 0.0)
        throw std::invalid_argument("probe_widths: FOV diameter and angle must be positive");
    const double w1 = (fov_diameter_px / 50.0) * (kReferenceFovAngleDeg / fov_angle_deg);
    return {w1, 0.75 * w1, 0.5 * w1};
}

std::vector<double> probe_lengths(std::span<const double> widths) {
    std::vector<double> out;
    out.reserve(widths.size());
    for (double w : widths) out.push_back(0.75 * w);
    return out;
}

std::pair<double, double> adapt_intensities(double image_mean_value) {
    if (!(image_mean_value >= 0.0 && image_mean_value < kLipM))
        throw std::invalid_argument("adapt_intensities: mean must be in [0, M)");
    const double h_lr = image_mean_value;
    const double h_c = lip_add(kCenterIntensityRef, lip_sub(h_lr, kSideIntensityRef));
    return {h_c, h_lr};
}

std::vector<double> orientations(int count) {
    if (count < 1) throw std::invalid_argument("orientations: count must be >= 1");
    std::vector<double> out;
    out.reserve(count);
    const double step = 2.0 * M_PI / count;
    for (int i = 0; i < count; ++i) out.push_back(i * step);
    return out;
}

RasterProbe rasterize(const ProbeSpec& spec, double theta) {
    if (spec.length < 1.0)
        throw std::invalid_argument("rasterize: probe length below 1 pixel");
    const Offset t = side_translation(spec.width, theta);
    if (t.dx == 0 && t.dy == 0)
        throw std::invalid_argument("rasterize: side translation rounds to zero, segments overlap");

    RasterProbe rp;
    rp.orientation = theta;
    rp.center_intensity = spec.center_intensity;
    rp.side_intensity = spec.side_intensity;
    rp.center = digital_line(iround(spec.length * std::cos(theta)),
                             iround(spec.length * std::sin(theta)));
    rp.left = translate(rp.center, {-t.dx, -t.dy});
    rp.right = translate(rp.center, t);
    return rp;
}

double fov_diameter(const BinaryMask& mask) {
    int minx = std::numeric_limits<int>::max(), miny = minx;
    int maxx = -1, maxy = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            minx = std::min(minx, x);
            miny = std::min(miny, y);
            maxx = std::max(maxx, x);
            maxy = std::max(maxy, y);
        }
    }
    if (maxx < 0) throw std::invalid_argument("fov_diameter: empty mask");
    return ((maxx - minx + 1) + (maxy - miny + 1)) / 2.0;
}

ProbeFamily make_probe_family(double fov_diameter_px, double fov_angle_deg,
                              double center_intensity, double side_intensity,
                              int orientation_count) {
    ProbeFamily family;
    family.orientations = orientations(orientation_count);

    const auto widths = probe_widths(fov_diameter_px, fov_angle_deg);
    for (double w : widths) {
        const ProbeSpec spec{w, 0.75 * w, center_intensity, side_intensity};
        // Drop a scale when any orientation rasterizes with overlapping
        // segments or a sub-pixel length; smaller scales only get worse.
        bool degenerate = spec.length < 1.0;
        for (double theta : family.orientations) {
            if (degenerate) break;
            const Offset t = side_translation(w, theta);
            if (t.dx == 0 && t.dy == 0) {
                degenerate = true;
                break;
            }
            const RasterProbe rp = rasterize(spec, theta);
            std::vector<Offset> all;
            all.reserve(3 * rp.center.size());
            all.insert(all.end(), rp.center.begin(), rp.center.end());
            all.insert(all.end(), rp.left.begin(), rp.left.end());
            all.insert(all.end(), rp.right.begin(), rp.right.end());
            std::sort(all.begin(), all.end(), [](Offset a, Offset b) {
                return a.dy != b.dy ? a.dy < b.dy : a.dx < b.dx;
            });
            degenerate = std::adjacent_find(all.begin(), all.end()) != all.end();
        }
        if (degenerate) continue;
        family.probes.push_back(spec);
    }
    if (family.probes.empty())
        throw std::invalid_argument("make_probe_family: every scale degenerates (FOV too small)");
    return family;
}

}  // namespace lipvessel
