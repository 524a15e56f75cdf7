#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lipvessel {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major 2-D raster. GrayImage carries real-valued intensities on the
// logarithmic scale (NaN marks an undefined pixel in detector maps);
// BinaryMask uses 0/1.
template <typename T>
class Image {
public:
    Image() = default;

    Image(int width, int height, T fill = T{})
        : width_(checked_extent(width)), height_(checked_extent(height)),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::vector<T>& pixels() { return data_; }
    const std::vector<T>& pixels() const { return data_; }

    template <typename U>
    bool same_size(const Image<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static int checked_extent(int v) {
        if (v < 1) throw std::invalid_argument("Image: width and height must be >= 1");
        return v;
    }

    int width_ = 0, height_ = 0;
    std::vector<T> data_;
};

using GrayImage = Image<double>;
using BinaryMask = Image<std::uint8_t>;
using ColorImage = Image<Rgb>;

// 0.299 R + 0.587 G + 0.114 B, kept real-valued (no rounding).
GrayImage luminance(const ColorImage& img);

// (M-1) - v per pixel; involutive on [0, M-1]. Puts a photograph's dark
// vessels on top of the topographic surface.
GrayImage complement(const GrayImage& img);

// Arithmetic mean of img over the set pixels of mask. Throws on an empty
// mask or mismatched dimensions.
double image_mean(const GrayImage& img, const BinaryMask& mask);

std::size_t count_set(const BinaryMask& mask);

}  // namespace lipvessel
