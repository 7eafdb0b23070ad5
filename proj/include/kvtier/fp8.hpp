#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "kvtier/bf16.hpp"

namespace kvtier {

/// Bit layout of an 8-bit float: 1 sign bit, exponent_bits, fraction_bits.
///
/// E4M3 follows the "fn" convention (no infinities, exponent field 1111 is a
/// normal binade except S.1111.111 which is NaN, max 448). E5M2 follows IEEE
/// (exponent field 11111 reserved for Inf/NaN, max 57344).
struct Fp8Format {
    int exponent_bits;
    int fraction_bits;
    int bias;
    bool ieee_special;  // top exponent field reserved for Inf/NaN

    constexpr int max_exponent_field() const noexcept {
        return (1 << exponent_bits) - 1 - (ieee_special ? 1 : 0);
    }
    constexpr int max_fraction_at_top() const noexcept {
        // E4M3fn: fraction 111 at the top field is NaN.
        return (1 << fraction_bits) - 1 - (ieee_special ? 0 : 1);
    }
    constexpr std::uint8_t max_finite_code() const noexcept {
        return static_cast<std::uint8_t>((max_exponent_field() << fraction_bits) |
                                         max_fraction_at_top());
    }
    double max_finite() const noexcept {
        return std::ldexp(1.0 + std::ldexp(max_fraction_at_top(), -fraction_bits),
                          max_exponent_field() - bias);
    }
    constexpr bool is_finite_code(std::uint8_t code) const noexcept {
        const int e = (code & 0x7F) >> fraction_bits;
        const int f = code & ((1 << fraction_bits) - 1);
        if (e < max_exponent_field()) return true;
        if (e == max_exponent_field()) return f <= max_fraction_at_top();
        return false;
    }
};

inline constexpr Fp8Format kE4M3{4, 3, 7, false};
inline constexpr Fp8Format kE5M2{5, 2, 15, true};

/// Exact value of a finite FP8 code. Non-finite codes decode to NaN.
inline double fp8_to_real(std::uint8_t code, const Fp8Format& fmt) noexcept {
    if (!fmt.is_finite_code(code)) return std::numeric_limits<double>::quiet_NaN();
    const bool neg = (code & 0x80) != 0;
    const int e = (code & 0x7F) >> fmt.fraction_bits;
    const int f = code & ((1 << fmt.fraction_bits) - 1);
    double mag;
    if (e == 0) {
        mag = std::ldexp(static_cast<double>(f), 1 - fmt.bias - fmt.fraction_bits);
    } else {
        mag = std::ldexp(static_cast<double>((1 << fmt.fraction_bits) | f),
                         e - fmt.bias - fmt.fraction_bits);
    }
    return neg ? -mag : mag;
}

/// Nearest FP8 code to a finite real, ties to even, saturating at max finite.
/// Signed zero is preserved and subnormal codes are produced when needed.
inline std::uint8_t fp8_from_real(double x, const Fp8Format& fmt) noexcept {
    const std::uint8_t sign = std::signbit(x) ? 0x80 : 0x00;
    const double a = std::fabs(x);
    if (a == 0.0) return sign;

    const int min_normal_exp = 1 - fmt.bias;
    const int e = std::max(std::ilogb(a), min_normal_exp);
    const double quantum = std::ldexp(1.0, e - fmt.fraction_bits);
    // Number of quanta, rounded half to even. At most 2^(fraction_bits+1).
    const double steps = std::nearbyint(a / quantum);
    if (steps * quantum > fmt.max_finite()) {
        return static_cast<std::uint8_t>(sign | fmt.max_finite_code());
    }

    const auto n = static_cast<int>(steps);
    const int implicit = 1 << fmt.fraction_bits;
    int exp_field;
    int frac;
    if (n < implicit) {
        // Only reachable in the subnormal binade (or rounding to zero there).
        exp_field = 0;
        frac = n;
    } else if (n == 2 * implicit) {
        exp_field = e + 1 + fmt.bias;
        frac = 0;
    } else {
        exp_field = e + fmt.bias;
        frac = n - implicit;
    }
    return static_cast<std::uint8_t>(sign | (exp_field << fmt.fraction_bits) | frac);
}

inline std::uint8_t fp8_from_bf16(Bf16 v, const Fp8Format& fmt) noexcept {
    return fp8_from_real(bf16_to_real(v), fmt);
}

/// Every finite FP8 value is exactly representable in BF16.
inline Bf16 fp8_to_bf16(std::uint8_t code, const Fp8Format& fmt) {
    return bf16_from_real(fp8_to_real(code, fmt));
}

}  // namespace kvtier
