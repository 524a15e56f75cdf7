#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

#include "lipvessel/image.hpp"

namespace lipvessel::fixtures {

inline GrayImage row_profile(std::initializer_list<double> values) {
    GrayImage out(static_cast<int>(values.size()), 1);
    int x = 0;
    for (double v : values) out.at(x++, 0) = v;
    return out;
}

inline BinaryMask full_mask(int w, int h) { return BinaryMask(w, h, 1); }

inline BinaryMask disc_mask(int w, int h, double cx, double cy, double r) {
    BinaryMask mask(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) mask.at(x, y) = 1;
    return mask;
}

inline GrayImage random_gray(int w, int h, double lo, double hi, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    GrayImage out(w, h);
    for (auto& v : out.pixels()) v = dist(rng);
    return out;
}

inline BinaryMask random_mask(int w, int h, double density, uint32_t seed) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution dist(density);
    BinaryMask out(w, h, 0);
    for (auto& v : out.pixels()) v = dist(rng) ? 1 : 0;
    return out;
}

// Quarter-turn of the lattice: input (x, y) lands at (y, width-1-x). Applying
// it four times is the identity.
template <typename T>
Image<T> rot90(const Image<T>& in) {
    Image<T> out(in.height(), in.width());
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) out.at(y, in.width() - 1 - x) = in.at(x, y);
    return out;
}

// A fundus-like test scene: bright retina disc on black, one dark sinuous
// vessel, a gentle illumination gradient and a little deterministic noise.
// All channels equal, so the luminance equals the drawn value.
struct SyntheticFundus {
    ColorImage image;
    BinaryMask vessel;  // ground truth of the drawn curve
    BinaryMask fov;
};

// amp and cycles shape the vessel curve cy(x) = c + amp*size*sin(2*pi*cycles*x/size).
// Max slope is amp*2*pi*cycles; above ~1 the drawn band loses 8-connectivity.
inline SyntheticFundus synthetic_fundus(int size, uint32_t seed, double noise_amp = 2.0,
                                        double half_thick = 1.5, double amp = 0.28,
                                        double cycles = 1.3) {
    const double c = size / 2.0;
    const double radius = size * 0.45;
    SyntheticFundus s{ColorImage(size, size, {0, 0, 0}), BinaryMask(size, size, 0),
                      BinaryMask(size, size, 0)};

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> noise(-noise_amp, noise_amp);

    GrayImage level(size, size, 0.0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double d2 = (x - c) * (x - c) + (y - c) * (y - c);
            const double n = noise(rng);
            if (d2 > radius * radius) continue;
            s.fov.at(x, y) = 1;
            level.at(x, y) = 170.0 + 12.0 * (y - c) / size + n;
        }
    }

    // Sinuous dark curve crossing the disc horizontally, 2*half_thick wide.
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            if (!s.fov.at(x, y)) continue;
            const double cy =
                c + amp * size * std::sin(2.0 * std::numbers::pi * cycles * x / size);
            if (std::abs(y - cy) <= half_thick) {
                level.at(x, y) = 60.0 + noise(rng);
                s.vessel.at(x, y) = 1;
            }
        }
    }

    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double v = std::clamp(level.at(x, y), 0.0, 255.0);
            const auto b = static_cast<uint8_t>(std::lround(v));
            s.image.at(x, y) = {b, b, b};
        }
    }
    return s;
}

}  // namespace lipvessel::fixtures
