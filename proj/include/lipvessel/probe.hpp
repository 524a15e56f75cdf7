#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "lipvessel/image.hpp"

namespace lipvessel {

// Reference operating point of the probe intensities and the reference
// camera FOV angle the width rule is normalised to. The central segment is
// the brighter one in grey-tone terms: it must reach the vessel relief
// before the side segments do, which is what makes vessel pixels the zeros
// of the detector.
inline constexpr double kCenterIntensityRef = 225.0;
inline constexpr double kSideIntensityRef = 215.0;
inline constexpr double kReferenceFovAngleDeg = 45.0;
inline constexpr int kDefaultOrientationCount = 18;

struct Offset {
    int dx = 0, dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

// Geometry and intensities of one 3-segment probe. width is the full
// left-to-right distance, each side segment sits at width/2 from the
// central one; length runs along the orientation.
struct ProbeSpec {
    double width = 0.0;
    double length = 0.0;
    double center_intensity = kCenterIntensityRef;
    double side_intensity = kSideIntensityRef;
};

// A probe rasterized at one orientation: three equally long digital
// segments as pixel offsets from the probe origin, which is an extremity
// of the central segment (so center contains (0,0)).
struct RasterProbe {
    double orientation = 0.0;  // radians
    std::vector<Offset> center, left, right;
    double center_intensity = kCenterIntensityRef;
    double side_intensity = kSideIntensityRef;
};

// Probes ordered by strictly decreasing width, plus the orientation set
// they are scanned over.
struct ProbeFamily {
    std::vector<ProbeSpec> probes;
    std::vector<double> orientations;  // radians
};

// w1 = (d_fov/50)(45/alpha), w2 = 0.75 w1, w3 = 0.5 w1.
std::array<double, 3> probe_widths(double fov_diameter_px, double fov_angle_deg);

// l_i = 0.75 w_i (a probe is shorter than it is wide).
std::vector<double> probe_lengths(std::span<const double> widths);

// Shift the reference intensities (225, 215) by the logarithmic offset that
// moves the side value onto the image mean: h_lr = m_f,
// h_c = 225 (+) (m_f (-) 215). The gap h_c (-) h_lr stays 225 (-) 215.
// Returns {h_c, h_lr}; throws std::invalid_argument if the mean is outside
// [0, 256).
std::pair<double, double> adapt_intensities(double image_mean_value);

// n angles equally spaced over the full circle. The probe origin is a
// segment extremity, so theta and theta+180 deg give different probes.
std::vector<double> orientations(int count);

// Digital line from (0,0) to (round(l cos t), round(l sin t)) for the
// central segment; the side segments are that line translated by the
// rounded +/- (w/2) perpendicular. Throws if length < 1 px or the side
// translation rounds to zero (segments would overlap).
RasterProbe rasterize(const ProbeSpec& spec, double theta);

// Mean of the bounding-box width and height of the set pixels.
double fov_diameter(const BinaryMask& mask);

// Widths/lengths from the FOV rule with the given intensities. A scale is
// dropped as degenerate when its length rounds below 1 px or any orientation
// yields overlapping segments (the smallest scales degenerate first).
// Throws if none survive.
ProbeFamily make_probe_family(double fov_diameter_px, double fov_angle_deg,
                              double center_intensity, double side_intensity,
                              int orientation_count = kDefaultOrientationCount);

// Symmetric-rounding digital line between (0,0) and (ex, ey); 8-connected,
// endpoints included, one point per major-axis step. The rounding is odd
// (round half away from zero) so the raster commutes with the lattice
// symmetries; the rotation-equivariance of the detector depends on this.
std::vector<Offset> digital_line(int ex, int ey);

}  // namespace lipvessel
