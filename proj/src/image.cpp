#include "lipvessel/image.hpp"

#include <stdexcept>

#include "lipvessel/lip.hpp"

namespace lipvessel {

GrayImage luminance(const ColorImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    // 0.299 R + 0.587 G + 0.114 B, rearranged so equal channels map to their
    // exact value (the three weights do not sum to 1 in binary floating point).
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double g = src[i].g;
        dst[i] = g + 0.299 * (src[i].r - g) + 0.114 * (src[i].b - g);
    }
    return out;
}

GrayImage complement(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = (kLipM - 1.0) - src[i];
    return out;
}

double image_mean(const GrayImage& img, const BinaryMask& mask) {
    if (!img.same_size(mask))
        throw std::invalid_argument("image_mean: image and mask dimensions differ");
    double sum = 0.0;
    std::size_t n = 0;
    const auto& v = img.pixels();
    const auto& m = mask.pixels();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (m[i]) {
            sum += v[i];
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("image_mean: empty mask");
    return sum / static_cast<double>(n);
}

std::size_t count_set(const BinaryMask& mask) {
    std::size_t n = 0;
    for (auto v : mask.pixels())
        if (v) ++n;
    return n;
}

}  // namespace lipvessel
