#include "lipvessel/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lipvessel/errors.hpp"
#include "lipvessel/lip.hpp"
#include "lipvessel/probe.hpp"
#include "lipvessel/vesselness.hpp"

namespace lipvessel {

namespace {

constexpr int kNeighbors8[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                   {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

// Flood from the seed set across pixels where grow(x, y) holds, 8-connectivity.
// Marks reached pixels in `seen` (callers pre-mark the seeds).
template <typename Grow>
void flood8(const BinaryMask& seen_domain, std::vector<int>& stack,
            std::vector<uint8_t>& seen, Grow grow) {
    const int w = seen_domain.width(), h = seen_domain.height();
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w, y = idx / w;
        for (const auto& d : kNeighbors8) {
            const int nx = x + d[0], ny = y + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int nidx = ny * w + nx;
            if (seen[nidx] || !grow(nx, ny)) continue;
            seen[nidx] = 1;
            stack.push_back(nidx);
        }
    }
}

}  // namespace

void PipelineParams::validate() const {
    if (!(area_fraction > 0.0 && area_fraction < 1.0))
        throw std::invalid_argument("area fraction must be in (0,1)");
    if (!(change_limit > 0.0 && change_limit < 1.0))
        throw std::invalid_argument("change limit must be in (0,1)");
    if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
        throw std::invalid_argument("discard fraction must be in [0,1)");
    if (max_probes < 1 || max_probes > 3)
        throw std::invalid_argument("probe count must be 1, 2 or 3");
    if (orientation_count < 1)
        throw std::invalid_argument("orientation count must be >= 1");
    if (!(fov_angle_deg > 0.0))
        throw std::invalid_argument("field-of-view angle must be positive");
    if (!(fov_threshold >= 0.0))
        throw std::invalid_argument("field-of-view threshold must be >= 0");
}

BinaryMask threshold_by_area(const VesselnessMap& e, double fraction,
                             std::vector<std::string>* warnings) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("threshold_by_area: fraction must be in (0,1)");

    std::vector<double> vals;
    vals.reserve(e.values.size());
    const auto& src = e.values.pixels();
    const auto& fov = e.fov.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        if (fov[i] && map_defined(src[i])) vals.push_back(src[i]);
    if (vals.empty()) throw PipelineError("threshold_by_area: no defined pixel");

    const auto n = vals.size();
    auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    auto nth = vals.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(vals.begin(), nth, vals.end());
    const double t = *nth;

    BinaryMask mask(e.values.width(), e.values.height(), 0);
    auto& out = mask.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        if (fov[i] && map_defined(src[i]) && src[i] <= t) out[i] = 1;

    if (warnings) {
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        if (*lo == *hi)
            warnings->push_back("constant vesselness map: threshold selects every defined pixel");
    }
    return mask;
}

ProbeSelection select_probe_count(const GrayImage& f, const ProbeFamily& family,
                                  const PipelineParams& params, const BinaryMask& fov,
                                  std::vector<std::string>* warnings) {
    if (family.probes.empty())
        throw std::invalid_argument("select_probe_count: empty probe family");

    const DetectorParams dp{params.discard_fraction, family.orientations};
    const int candidates = std::min<int>(params.max_probes,
                                         static_cast<int>(family.probes.size()));

    ProbeSelection sel;
    sel.maps.push_back(vesselness_multiscale(f, family, 1, dp, fov));
    sel.seg = threshold_by_area(sel.maps.back(), params.area_fraction, warnings);
    sel.probes_used = 1;

    const auto base = sel.seg.pixels();
    const double budget = params.change_limit * static_cast<double>(count_set(sel.seg));

    GrayImage acc = sel.maps.back().values;
    for (int i = 2; i <= candidates; ++i) {
        const GrayImage layer =
            detector_map_probe(f, family.probes[i - 1], dp, fov);
        auto& a = acc.pixels();
        const auto& l = layer.pixels();
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (std::isnan(a[j])) a[j] = l[j];
            else if (!std::isnan(l[j])) a[j] = std::min(a[j], l[j]);
        }

        VesselnessMap cand{acc, fov, i};
        BinaryMask seg_i = threshold_by_area(cand, params.area_fraction, warnings);

        std::size_t changed = 0;
        const auto& cur = seg_i.pixels();
        for (std::size_t j = 0; j < cur.size(); ++j)
            if (cur[j] != base[j]) ++changed;
        if (static_cast<double>(changed) > budget) break;

        sel.maps.push_back(std::move(cand));
        sel.seg = std::move(seg_i);
        sel.probes_used = i;
    }
    return sel;
}

BinaryMask remove_small_components(const BinaryMask& mask, double min_area) {
    if (min_area < 0.0)
        throw std::invalid_argument("remove_small_components: negative area");

    const int w = mask.width(), h = mask.height();
    BinaryMask out = mask;
    std::vector<uint8_t> seen(mask.size(), 0);
    std::vector<int> stack, component;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int idx = y * w + x;
            if (!mask.pixels()[idx] || seen[idx]) continue;
            component.clear();
            component.push_back(idx);
            seen[idx] = 1;
            stack.assign(1, idx);
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cx = cur % w, cy = cur / w;
                for (const auto& d : kNeighbors8) {
                    const int nx = cx + d[0], ny = cy + d[1];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int nidx = ny * w + nx;
                    if (seen[nidx] || !mask.pixels()[nidx]) continue;
                    seen[nidx] = 1;
                    stack.push_back(nidx);
                    component.push_back(nidx);
                }
            }
            if (static_cast<double>(component.size()) < min_area)
                for (int p : component) out.pixels()[p] = 0;
        }
    }
    return out;
}

BinaryMask fill_small_holes(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    const auto& m = mask.pixels();

    // Marker: background pixels whose full 3x3 neighbourhood is background.
    // Beyond the frame counts as background.
    std::vector<uint8_t> reached(mask.size(), 0);
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int idx = y * w + x;
            if (m[idx]) continue;
            bool survives = true;
            for (int dy = -1; dy <= 1 && survives; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (m[ny * w + nx]) { survives = false; break; }
                }
            if (survives) {
                reached[idx] = 1;
                stack.push_back(idx);
            }
        }
    }

    // Reconstruction by dilation under the complemented mask.
    flood8(mask, stack, reached, [&](int x, int y) { return m[y * w + x] == 0; });

    BinaryMask out(w, h, 0);
    for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] = reached[i] ? 0 : 1;
    return out;
}

BinaryMask fov_from_image(const GrayImage& lum, double threshold) {
    const int w = lum.width(), h = lum.height();
    BinaryMask bright(w, h, 0);
    std::size_t n_bright = 0;
    for (std::size_t i = 0; i < bright.size(); ++i)
        if (lum.pixels()[i] > threshold) { bright.pixels()[i] = 1; ++n_bright; }
    if (n_bright == 0)
        throw PipelineError("field of view: no pixel brighter than the threshold");

    // Largest 8-connected bright component; first in scan order wins ties.
    std::vector<uint8_t> seen(bright.size(), 0);
    std::vector<int> stack, component, largest;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int idx = y * w + x;
            if (!bright.pixels()[idx] || seen[idx]) continue;
            component.assign(1, idx);
            seen[idx] = 1;
            stack.assign(1, idx);
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cx = cur % w, cy = cur / w;
                for (const auto& d : kNeighbors8) {
                    const int nx = cx + d[0], ny = cy + d[1];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int nidx = ny * w + nx;
                    if (seen[nidx] || !bright.pixels()[nidx]) continue;
                    seen[nidx] = 1;
                    stack.push_back(nidx);
                    component.push_back(nidx);
                }
            }
            if (component.size() > largest.size()) largest.swap(component);
        }
    }

    BinaryMask fov(w, h, 0);
    for (int p : largest) fov.pixels()[p] = 1;

    // Fill interior holes: background flooded from the frame border stays
    // background, everything else joins the mask.
    std::vector<uint8_t> outside(fov.size(), 0);
    stack.clear();
    for (int x = 0; x < w; ++x) {
        for (int y : {0, h - 1}) {
            const int idx = y * w + x;
            if (!fov.pixels()[idx] && !outside[idx]) { outside[idx] = 1; stack.push_back(idx); }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x : {0, w - 1}) {
            const int idx = y * w + x;
            if (!fov.pixels()[idx] && !outside[idx]) { outside[idx] = 1; stack.push_back(idx); }
        }
    }
    flood8(fov, stack, outside, [&](int x, int y) { return fov.pixels()[y * w + x] == 0; });
    for (std::size_t i = 0; i < fov.size(); ++i)
        if (!outside[i]) fov.pixels()[i] = 1;
    return fov;
}

SegmentationResult segment_vessels(const GrayImage& complemented, const BinaryMask& fov,
                                   const PipelineParams& params) {
    params.validate();
    if (!complemented.same_size(fov))
        throw std::invalid_argument("segment_vessels: image and mask dimensions differ");
    if (count_set(fov) == 0) throw PipelineError("segment_vessels: empty field of view");

    const double d_fov = fov_diameter(fov);
    const auto widths = probe_widths(d_fov, params.fov_angle_deg);
    const long footprint = std::lround(0.75 * widths[0]) + std::lround(widths[0] / 2.0);
    if (footprint >= std::min(complemented.width(), complemented.height()))
        throw PipelineError("segment_vessels: image smaller than the largest probe");

    double h_c = kCenterIntensityRef, h_lr = kSideIntensityRef;
    if (params.adapt_intensities) {
        const double m_f = image_mean(complemented, fov);
        std::tie(h_c, h_lr) = adapt_intensities(m_f);
    }

    const ProbeFamily family = make_probe_family(d_fov, params.fov_angle_deg, h_c, h_lr,
                                                 params.orientation_count);

    SegmentationResult result;
    ProbeSelection sel =
        select_probe_count(complemented, family, params, fov, &result.warnings);

    const double min_area = (widths[0] / 2.0) * (widths[0] / 2.0);
    BinaryMask mask = remove_small_components(sel.seg, min_area);
    mask = fill_small_holes(mask);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!fov.pixels()[i]) mask.pixels()[i] = 0;

    result.mask = std::move(mask);
    result.normalized = normalize_map(sel.maps.back());
    result.vesselness = std::move(sel.maps.back());
    result.probes_used = sel.probes_used;
    return result;
}

SegmentationResult segment_vessels(const ColorImage& img,
                                   const std::optional<BinaryMask>& fov,
                                   const PipelineParams& params) {
    params.validate();
    const GrayImage lum = luminance(img);
    BinaryMask mask = fov ? *fov : fov_from_image(lum, params.fov_threshold);
    if (fov && !lum.same_size(mask))
        throw std::invalid_argument("segment_vessels: image and mask dimensions differ");
    return segment_vessels(complement(lum), mask, params);
}

}  // namespace lipvessel
