#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lipvessel/image.hpp"
#include "lipvessel/probe.hpp"

namespace lipvessel {

inline constexpr double kDefaultDiscardFraction = 0.20;

struct DetectorParams {
    // Fraction of a segment's smallest samples dropped by the robust
    // minimum; the rank is k = floor(fraction * n_valid) + 1 per pixel.
    double discard_fraction = kDefaultDiscardFraction;
    std::vector<double> orientations;  // radians, non-empty
};

// Detector map restricted to the FOV. values is NaN exactly where the probe
// evaluation is undefined (outside the FOV, or some segment had no valid
// sample); probes_used is the I of e^I.
struct VesselnessMap {
    GrayImage values;
    BinaryMask fov;
    int probes_used = 0;
};

inline bool map_defined(double v) { return !std::isnan(v); }

// k-th smallest with k = floor(discard_fraction * n) + 1; fraction 0 gives
// the exact minimum. Throws on an empty set.
double kth_min(std::span<const double> values, double discard_fraction);

// Robust contact level of one segment: at each x, the rank-k minimum over
// the segment's valid samples of f(x+h) (-) intensity. Samples outside the
// image or outside `valid` are excluded; no valid sample -> NaN.
GrayImage constant_map(const GrayImage& f, std::span<const Offset> segment,
                       double intensity, double discard_fraction,
                       const BinaryMask& valid);

// Contact level of the whole probe: pointwise min of the central segment's
// exact-minimum map (the central segment must fully enter the relief) and
// the two robust side maps. NaN where any of the three is undefined.
GrayImage grave_constant_map(const GrayImage& f, const RasterProbe& probe,
                             double discard_fraction, const BinaryMask& valid);

// Bump detector at one orientation: logarithmic contrast of each side
// segment's robust minimum against the probe contact level, combined by
// pointwise supremum of the left and right detectors.
GrayImage detector_map_orientation(const GrayImage& f, const RasterProbe& probe,
                                   double discard_fraction, const BinaryMask& valid);

// Pointwise infimum of the orientation maps; undefined orientations are
// ignored (defined wherever at least one orientation is).
GrayImage detector_map_probe(const GrayImage& f, const ProbeSpec& spec,
                             const DetectorParams& params, const BinaryMask& valid);

// e^I: pointwise infimum of the single-probe maps of the first probe_count
// probes of the family.
VesselnessMap vesselness_multiscale(const GrayImage& f, const ProbeFamily& family,
                                    int probe_count, const DetectorParams& params,
                                    const BinaryMask& valid);

// 1-D specialization (the pedagogical oracle): 3-point probe at offsets
// -d, 0, +d with the given intensities, exact minima. profile must have
// height 1 and width > 2d. NaN outside the admissible range.
GrayImage profile_detector_1d(const GrayImage& profile, int half_width,
                              double left_intensity, double center_intensity,
                              double right_intensity);

// Clip above the median of the defined values, then map linearly onto [0,1]
// flipped so vessels (the valleys of e) come out near 1. A constant map
// normalises to all zeros. Throws if no pixel is defined.
VesselnessMap normalize_map(const VesselnessMap& e);

}  // namespace lipvessel
