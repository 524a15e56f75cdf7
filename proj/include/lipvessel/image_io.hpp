#pragma once

#include <filesystem>

#include "lipvessel/image.hpp"

namespace lipvessel {

// PNG/PPM/TIFF/JPEG in, PNG out. GIF is not decoded; convert once (see
// README). All loaders throw IoError on unreadable files.
ColorImage load_color(const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);  // nonzero -> set

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
void save_color_png(const std::filesystem::path& path, const ColorImage& img);

// 32-bit float raster, little-endian (scale -1.0), rows bottom-up.
// Undefined pixels stay NaN.
void save_pfm(const std::filesystem::path& path, const GrayImage& map);
GrayImage load_pfm(const std::filesystem::path& path);

// 16-bit grayscale PNG, defined values affinely mapped onto [0, 65535]
// (undefined -> 0), with the min/max recorded in <path>.minmax.txt.
void save_png16_with_sidecar(const std::filesystem::path& path, const GrayImage& map);

}  // namespace lipvessel
