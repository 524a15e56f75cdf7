#pragma once

#include <cmath>
#include <stdexcept>

namespace lipvessel {

// Upper bound of the logarithmic grey scale. Intensities live in ]-inf, M[,
// with 0 the white extremity and M the (unreachable) black extremity.
inline constexpr double kLipM = 256.0;

// f (+) g = f + g - fg/M. Total over the extended range, commutative,
// associative, 0 is neutral.
inline constexpr double lip_add(double a, double b) {
    return a + b - a * b / kLipM;
}

// f (-) g = (f - g) / (1 - g/M). Inverse of lip_add in its second argument;
// may be negative. Requires g < M so the denominator stays positive.
inline double lip_sub(double a, double b) {
    if (b >= kLipM) throw std::domain_error("lip_sub: subtrahend must be < M");
    return (a - b) / (1.0 - b / kLipM);
}

}  // namespace lipvessel
