#include <stdexcept>

#include "lipvessel/evaluation.hpp"

namespace lipvessel {

namespace {
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kCyan{0, 255, 255};
constexpr Rgb kRed{255, 0, 0};
}  // namespace

ColorImage render_overlay(const BinaryMask& pred, const BinaryMask& ref,
                          const BinaryMask& fov) {
    if (!pred.same_size(ref) || !pred.same_size(fov))
        throw std::invalid_argument("render_overlay: mask dimensions differ");
    ColorImage out(pred.width(), pred.height(), kWhite);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!fov.pixels()[i]) continue;
        const bool p = pred.pixels()[i] != 0;
        const bool r = ref.pixels()[i] != 0;
        out.pixels()[i] = p ? (r ? kBlack : kCyan) : (r ? kRed : kWhite);
    }
    return out;
}

}  // namespace lipvessel
