#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipvessel/image.hpp"
#include "lipvessel/probe.hpp"
#include "lipvessel/vesselness.hpp"

namespace lipvessel {

struct PipelineParams {
    double area_fraction = 0.12;    // FOV fraction segmented as vessel
    double change_limit = 0.40;     // probe-count acceptance rule
    int max_probes = 3;
    int orientation_count = kDefaultOrientationCount;
    double discard_fraction = kDefaultDiscardFraction;
    double fov_angle_deg = kReferenceFovAngleDeg;
    double fov_threshold = 20.0;    // luminance threshold for FOV extraction
    // When false the probes keep the reference intensities (225, 215)
    // instead of following the image mean.
    bool adapt_intensities = true;

    void validate() const;  // throws std::invalid_argument
};

// Vessels are the valleys of e: select the ceil(fraction * N) smallest
// defined values (N = defined pixel count); ties at the threshold value are
// all kept. A constant map selects every defined pixel and records a
// warning if `warnings` is given.
BinaryMask threshold_by_area(const VesselnessMap& e, double fraction,
                             std::vector<std::string>* warnings = nullptr);

struct ProbeSelection {
    int probes_used = 0;
    BinaryMask seg;                   // seg(e^I) for the accepted I
    std::vector<VesselnessMap> maps;  // maps[i] = e^(i+1) for each evaluated I
};

// Accept the largest I whose segmentation differs from seg(e^1) on at most
// change_limit * |seg(e^1)| pixels, stopping at the first failing I.
ProbeSelection select_probe_count(const GrayImage& f, const ProbeFamily& family,
                                  const PipelineParams& params, const BinaryMask& fov,
                                  std::vector<std::string>* warnings = nullptr);

// Clear 8-connected components of set pixels with pixel count < min_area.
BinaryMask remove_small_components(const BinaryMask& mask, double min_area);

// Erode the complement by the 3x3 square and reconstruct it by dilation
// under the complement (8-connectivity); background pockets too small to
// survive the erosion become vessel. The complement is taken over an
// implicitly background-padded plane, so regions touching the border stay.
BinaryMask fill_small_holes(const BinaryMask& mask);

// Pixels with luminance strictly above the threshold, reduced to the
// largest 8-connected component with all interior holes filled. Throws if
// nothing clears the threshold.
BinaryMask fov_from_image(const GrayImage& lum, double threshold = 20.0);

struct SegmentationResult {
    BinaryMask mask;
    VesselnessMap vesselness;  // accepted e^I
    VesselnessMap normalized;  // Phi
    int probes_used = 0;
    std::vector<std::string> warnings;
};

// Full pipeline from a colour fundus image: luminance -> complement ->
// FOV mean -> probe family -> probe-count selection -> area filter ->
// hole filling. Deterministic: identical inputs give bit-identical outputs.
SegmentationResult segment_vessels(const ColorImage& img,
                                   const std::optional<BinaryMask>& fov,
                                   const PipelineParams& params);

// Same pipeline entered after complementation, for callers that already
// hold the topographic surface (and for the lighting-invariance tests).
SegmentationResult segment_vessels(const GrayImage& complemented,
                                   const BinaryMask& fov,
                                   const PipelineParams& params);

}  // namespace lipvessel
