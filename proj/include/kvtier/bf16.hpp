#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "kvtier/error.hpp"

namespace kvtier {

/// A bfloat16 value held as its raw 16-bit pattern.
///
/// Layout: 1 sign bit, 8 exponent bits (bias 127), 7 fraction bits. This is the
/// upper half of an IEEE binary32, which is how conversions are done here.
class Bf16 {
public:
    static constexpr int kExponentBias = 127;
    static constexpr int kFractionBits = 7;
    static constexpr int kMinNormalExponent = -126;
    static constexpr int kMaxExponent = 127;

    constexpr Bf16() = default;

    static constexpr Bf16 from_bits(std::uint16_t bits) noexcept {
        Bf16 v;
        v.bits_ = bits;
        return v;
    }

    constexpr std::uint16_t bits() const noexcept { return bits_; }

    constexpr bool sign() const noexcept { return (bits_ >> 15) != 0; }
    constexpr std::uint16_t exponent_field() const noexcept { return (bits_ >> 7) & 0xFF; }
    constexpr std::uint16_t fraction_field() const noexcept { return bits_ & 0x7F; }

    constexpr bool is_zero() const noexcept { return (bits_ & 0x7FFF) == 0; }
    constexpr bool is_finite() const noexcept { return exponent_field() != 0xFF; }
    constexpr bool is_subnormal() const noexcept {
        return exponent_field() == 0 && fraction_field() != 0;
    }

    /// Unbiased exponent of the stored pattern. Subnormals report -126.
    constexpr int exponent() const noexcept {
        const int field = exponent_field();
        return field == 0 ? kMinNormalExponent : field - kExponentBias;
    }

    /// Exponent of the value once normalized to 1.f form, i.e. floor(log2|x|).
    /// Differs from exponent() only for subnormals. Undefined for zero.
    constexpr int normalized_exponent() const noexcept {
        if (!is_subnormal()) return exponent();
        const int lead = std::bit_width(static_cast<unsigned>(fraction_field())) - 1;
        return kMinNormalExponent - (kFractionBits - lead);
    }

    /// The 7 fraction bits following the leading 1 of the normalized value.
    constexpr std::uint8_t normalized_fraction() const noexcept {
        if (!is_subnormal()) return static_cast<std::uint8_t>(fraction_field());
        const unsigned frac = fraction_field();
        const int shift = kFractionBits - (std::bit_width(frac) - 1);
        return static_cast<std::uint8_t>((frac << shift) & 0x7F);
    }

    float to_float() const noexcept {
        return std::bit_cast<float>(static_cast<std::uint32_t>(bits_) << 16);
    }

    friend constexpr bool operator==(Bf16, Bf16) = default;

private:
    std::uint16_t bits_ = 0;
};

/// Exact real value of a BF16 pattern.
inline double bf16_to_real(Bf16 v) noexcept { return static_cast<double>(v.to_float()); }

/// Nearest BF16 to x, ties to the even fraction. Rounds directly from double, so
/// there is no intermediate binary32 rounding step.
inline Bf16 bf16_from_real(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("bf16_from_real: non-finite input");

    const bool neg = std::signbit(x);
    double a = std::fabs(x);
    if (a == 0.0) return Bf16::from_bits(neg ? 0x8000 : 0x0000);

    // Quantum of the target grid at |x|: 2^(e-7) for normals, 2^-133 below.
    int e = std::ilogb(a);
    if (e < Bf16::kMinNormalExponent) e = Bf16::kMinNormalExponent;
    const double quantum = std::ldexp(1.0, e - Bf16::kFractionBits);
    // a / quantum is exact in double (power-of-two scaling) unless it underflows,
    // which cannot happen for e >= -126.
    const double steps = std::nearbyint(a / quantum);  // ties-to-even under FE_TONEAREST
    const double rounded = steps * quantum;

    constexpr double kMaxFinite = 3.3895313892515355e38;  // 0x7F7F
    if (rounded > kMaxFinite) throw InvalidArgument("bf16_from_real: magnitude overflows bf16");

    // rounded is exactly representable in binary32 and in bf16.
    const auto f = std::bit_cast<std::uint32_t>(static_cast<float>(rounded));
    auto bits = static_cast<std::uint16_t>(f >> 16);
    if (neg) bits |= 0x8000;
    return Bf16::from_bits(bits);
}

}  // namespace kvtier
