#include "lipvessel/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "lipvessel/errors.hpp"

namespace lipvessel {

namespace {

cv::Mat read_or_throw(const std::filesystem::path& path, int flags) {
    cv::Mat m = cv::imread(path.string(), flags);
    if (m.empty()) throw IoError("cannot read image: " + path.string());
    return m;
}

void write_or_throw(const std::filesystem::path& path, const cv::Mat& m) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write " + path.string());
}

// PFM floats are stored in the byte order announced by the scale sign;
// we always write little-endian (scale -1.0).
float to_little_endian(float v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    uint32_t bits = std::bit_cast<uint32_t>(v);
    bits = __builtin_bswap32(bits);
    return std::bit_cast<float>(bits);
}

}  // namespace

ColorImage load_color(const std::filesystem::path& path) {
    const cv::Mat bgr = read_or_throw(path, cv::IMREAD_COLOR);
    ColorImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x)
            img.at(x, y) = {row[x][2], row[x][1], row[x][0]};
    }
    return img;
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const cv::Mat gray = read_or_throw(path, cv::IMREAD_GRAYSCALE);
    BinaryMask mask(gray.cols, gray.rows);
    for (int y = 0; y < gray.rows; ++y) {
        const auto* row = gray.ptr<uint8_t>(y);
        for (int x = 0; x < gray.cols; ++x) mask.at(x, y) = row[x] ? 1 : 0;
    }
    return mask;
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    cv::Mat m(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < m.rows; ++y) {
        auto* row = m.ptr<uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    }
    write_or_throw(path, m);
}

void save_color_png(const std::filesystem::path& path, const ColorImage& img) {
    cv::Mat m(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < m.rows; ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < m.cols; ++x) {
            const Rgb& p = img.at(x, y);
            row[x] = {p.b, p.g, p.r};
        }
    }
    write_or_throw(path, m);
}

void save_pfm(const std::filesystem::path& path, const GrayImage& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
    std::vector<float> row(map.width());
    for (int y = map.height() - 1; y >= 0; --y) {
        for (int x = 0; x < map.width(); ++x)
            row[x] = to_little_endian(static_cast<float>(map.at(x, y)));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw IoError("cannot write " + path.string());
}

GrayImage load_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::string magic;
    int w = 0, h = 0;
    double scale = 0.0;
    in >> magic >> w >> h >> scale;
    if (magic != "Pf" || w < 1 || h < 1 || scale == 0.0)
        throw IoError("not a grayscale PFM file: " + path.string());
    in.get();  // single whitespace byte after the header

    const bool file_little = scale < 0.0;
    GrayImage map(w, h);
    std::vector<float> row(static_cast<std::size_t>(w));
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw IoError("truncated PFM file: " + path.string());
        for (int x = 0; x < w; ++x) {
            float v = row[x];
            if (file_little != (std::endian::native == std::endian::little))
                v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<uint32_t>(v)));
            map.at(x, y) = v;
        }
    }
    return map;
}

void save_png16_with_sidecar(const std::filesystem::path& path, const GrayImage& map) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : map.pixels()) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool empty = lo > hi;
    const double span = hi - lo;

    cv::Mat m(map.height(), map.width(), CV_16UC1);
    for (int y = 0; y < m.rows; ++y) {
        auto* row = m.ptr<uint16_t>(y);
        for (int x = 0; x < m.cols; ++x) {
            const double v = map.at(x, y);
            if (std::isnan(v)) { row[x] = 0; continue; }
            const double unit = span > 0.0 ? (v - lo) / span : 0.0;
            row[x] = static_cast<uint16_t>(std::lround(unit * 65535.0));
        }
    }
    write_or_throw(path, m);

    std::filesystem::path sidecar = path;
    sidecar += ".minmax.txt";
    std::ofstream out(sidecar);
    if (!out) throw IoError("cannot write " + sidecar.string());
    out.precision(17);
    if (empty) out << "min nan\nmax nan\n";
    else out << "min " << lo << "\nmax " << hi << "\n";
    if (!out) throw IoError("cannot write " + sidecar.string());
}

}  // namespace lipvessel
