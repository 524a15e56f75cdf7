#include "lipvessel/vesselness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipvessel/errors.hpp"
#include "lipvessel/lip.hpp"

namespace lipvessel {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

double nan_min(double a, double b) {
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::min(a, b);
}

int rank_for(double discard_fraction, int n) {
    int k = static_cast<int>(std::floor(discard_fraction * n)) + 1;
    return std::min(k, n);
}

// Valid raw samples of one translated segment. Returns the count written
// into buf (resized by the caller to the segment size).
int gather(const GrayImage& f, const BinaryMask& valid, int x, int y,
           std::span<const Offset> segment, double* buf) {
    int n = 0;
    for (const Offset& h : segment) {
        const int px = x + h.dx, py = y + h.dy;
        if (!f.contains(px, py) || !valid.at(px, py)) continue;
        buf[n++] = f.at(px, py);
    }
    return n;
}

// Rank-k smallest of buf[0..n). Small n, selection network not worth it.
double select_kth(double* buf, int n, int k) {
    std::nth_element(buf, buf + (k - 1), buf + n);
    return buf[k - 1];
}

// lip_sub(v, intensity) with the denominator hoisted out of the pixel loop.
// Must stay the exact expression of lip_sub for oracle equivalence.
struct LipShift {
    double intensity;
    double den;  // 1 - intensity/M
    explicit LipShift(double h) : intensity(h), den(1.0 - h / kLipM) {
        if (h >= kLipM) throw std::domain_error("probe intensity must be < M");
    }
    double operator()(double v) const { return (v - intensity) / den; }
};

void check_inputs(const GrayImage& f, const BinaryMask& valid) {
    if (!f.same_size(valid))
        throw std::invalid_argument("detector: image and validity mask dimensions differ");
}

// One pass over the image computing the probe contact level and, when
// detector != nullptr, the oriented bump detector. A pixel is defined only
// when every segment has at least one valid sample.
void scan_probe(const GrayImage& f, const RasterProbe& probe, double discard_fraction,
                const BinaryMask& valid, GrayImage* grave, GrayImage* detector) {
    check_inputs(f, valid);
    if (probe.center.empty() || probe.left.empty() || probe.right.empty())
        throw std::invalid_argument("detector: probe has an empty segment");

    const LipShift shift_center(probe.center_intensity);
    const LipShift shift_side(probe.side_intensity);

    std::vector<double> bc(probe.center.size()), bl(probe.left.size()), br(probe.right.size());

    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            if (!valid.at(x, y)) continue;

            const int nc = gather(f, valid, x, y, probe.center, bc.data());
            if (nc == 0) continue;
            const int nl = gather(f, valid, x, y, probe.left, bl.data());
            if (nl == 0) continue;
            const int nr = gather(f, valid, x, y, probe.right, br.data());
            if (nr == 0) continue;

            // Central contact is exact; side contacts are rank-k robust.
            const double c_center = shift_center(*std::min_element(bc.data(), bc.data() + nc));
            const double c_left = shift_side(select_kth(bl.data(), nl, rank_for(discard_fraction, nl)));
            const double c_right = shift_side(select_kth(br.data(), nr, rank_for(discard_fraction, nr)));
            const double c_grave = std::min(c_center, std::min(c_left, c_right));

            if (grave) grave->at(x, y) = c_grave;
            if (detector) {
                const double e_left = lip_sub(c_left, c_grave);
                const double e_right = lip_sub(c_right, c_grave);
                detector->at(x, y) = std::max(e_left, e_right);
            }
        }
    }
}

}  // namespace

double kth_min(std::span<const double> values, double discard_fraction) {
    if (values.empty()) throw std::invalid_argument("kth_min: empty set");
    std::vector<double> buf(values.begin(), values.end());
    const int k = rank_for(discard_fraction, static_cast<int>(buf.size()));
    return select_kth(buf.data(), static_cast<int>(buf.size()), k);
}

GrayImage constant_map(const GrayImage& f, std::span<const Offset> segment,
                       double intensity, double discard_fraction,
                       const BinaryMask& valid) {
    check_inputs(f, valid);
    if (segment.empty()) throw std::invalid_argument("constant_map: empty segment");
    const LipShift shift(intensity);
    GrayImage out(f.width(), f.height(), kUndefined);
    std::vector<double> buf(segment.size());
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            if (!valid.at(x, y)) continue;
            const int n = gather(f, valid, x, y, segment, buf.data());
            if (n == 0) continue;
            out.at(x, y) = shift(select_kth(buf.data(), n, rank_for(discard_fraction, n)));
        }
    }
    return out;
}

GrayImage grave_constant_map(const GrayImage& f, const RasterProbe& probe,
                             double discard_fraction, const BinaryMask& valid) {
    GrayImage out(f.width(), f.height(), kUndefined);
    scan_probe(f, probe, discard_fraction, valid, &out, nullptr);
    return out;
}

GrayImage detector_map_orientation(const GrayImage& f, const RasterProbe& probe,
                                   double discard_fraction, const BinaryMask& valid) {
    GrayImage out(f.width(), f.height(), kUndefined);
    scan_probe(f, probe, discard_fraction, valid, nullptr, &out);
    return out;
}

GrayImage detector_map_probe(const GrayImage& f, const ProbeSpec& spec,
                             const DetectorParams& params, const BinaryMask& valid) {
    if (params.orientations.empty())
        throw std::invalid_argument("detector_map_probe: no orientations");
    GrayImage acc(f.width(), f.height(), kUndefined);
    GrayImage layer(f.width(), f.height(), kUndefined);
    for (double theta : params.orientations) {
        const RasterProbe rp = rasterize(spec, theta);
        std::fill(layer.pixels().begin(), layer.pixels().end(), kUndefined);
        scan_probe(f, rp, params.discard_fraction, valid, nullptr, &layer);
        auto& a = acc.pixels();
        const auto& l = layer.pixels();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = nan_min(a[i], l[i]);
    }
    return acc;
}

VesselnessMap vesselness_multiscale(const GrayImage& f, const ProbeFamily& family,
                                    int probe_count, const DetectorParams& params,
                                    const BinaryMask& valid) {
    if (probe_count < 1 || probe_count > static_cast<int>(family.probes.size()))
        throw std::invalid_argument("vesselness_multiscale: probe_count out of range");
    GrayImage acc(f.width(), f.height(), kUndefined);
    for (int i = 0; i < probe_count; ++i) {
        const GrayImage layer = detector_map_probe(f, family.probes[i], params, valid);
        auto& a = acc.pixels();
        const auto& l = layer.pixels();
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = nan_min(a[j], l[j]);
    }
    return {std::move(acc), valid, probe_count};
}

GrayImage profile_detector_1d(const GrayImage& profile, int half_width,
                              double left_intensity, double center_intensity,
                              double right_intensity) {
    if (profile.height() != 1)
        throw std::invalid_argument("profile_detector_1d: profile must have height 1");
    if (half_width < 1)
        throw std::invalid_argument("profile_detector_1d: probe half-width must be >= 1");
    if (profile.width() <= 2 * half_width)
        throw std::invalid_argument("profile_detector_1d: probe wider than profile");

    GrayImage out(profile.width(), 1, kUndefined);
    for (int x = half_width; x < profile.width() - half_width; ++x) {
        const double vl = lip_sub(profile.at(x - half_width, 0), left_intensity);
        const double vc = lip_sub(profile.at(x, 0), center_intensity);
        const double vr = lip_sub(profile.at(x + half_width, 0), right_intensity);
        const double c = std::min(vc, std::min(vl, vr));
        const double e_left = lip_sub(vl, c);
        const double e_right = lip_sub(vr, c);
        out.at(x, 0) = std::max(e_left, e_right);
    }
    return out;
}

VesselnessMap normalize_map(const VesselnessMap& e) {
    std::vector<double> defined;
    defined.reserve(e.values.size());
    const auto& src = e.values.pixels();
    const auto& fov = e.fov.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        if (fov[i] && map_defined(src[i])) defined.push_back(src[i]);
    if (defined.empty()) throw PipelineError("normalize_map: no defined pixel");

    // Median: midpoint of the two central order statistics for an even count.
    const std::size_t n = defined.size();
    auto mid = defined.begin() + n / 2;
    std::nth_element(defined.begin(), mid, defined.end());
    double median = *mid;
    if (n % 2 == 0) {
        const double lower = *std::max_element(defined.begin(), mid);
        median = (lower + median) / 2.0;
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : defined) {
        const double clipped = std::min(v, median);
        lo = std::min(lo, clipped);
        hi = std::max(hi, clipped);
    }

    VesselnessMap out{GrayImage(e.values.width(), e.values.height(), kUndefined),
                      e.fov, e.probes_used};
    auto& dst = out.values.pixels();
    const bool degenerate = hi == lo;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!(fov[i] && map_defined(src[i]))) continue;
        if (degenerate) {
            dst[i] = 0.0;
        } else {
            const double clipped = std::min(src[i], median);
            dst[i] = 1.0 - (clipped - lo) / (hi - lo);
        }
    }
    return out;
}

}  // namespace lipvessel
