#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kvtier/bf16.hpp"
#include "kvtier/error.hpp"

namespace kvtier {

/// Bit split of a GSE-8 byte: 1 sign bit, e_bits of shared-exponent index,
/// m_bits of fraction. The fraction field carries a leading-1 marker whose
/// position encodes how far the element's exponent sits below its shared one.
struct GseLayout {
    int e_bits = 4;
    int m_bits = 3;

    void validate() const {
        if (e_bits < 2 || m_bits < 2 || 1 + e_bits + m_bits != 8) {
            throw InvalidArgument("GseLayout: need e_bits >= 2, m_bits >= 2, 1 + e_bits + m_bits == 8");
        }
    }

    constexpr std::size_t max_entries() const noexcept { return std::size_t{1} << e_bits; }

    // Largest exponent gap representable with at least one explicit fraction bit.
    constexpr int base_step() const noexcept { return m_bits - 1; }

    friend constexpr bool operator==(GseLayout, GseLayout) = default;
};

/// Per-chunk shared exponents, strictly ascending, adjacent gaps <= step.
struct GseExponents {
    std::vector<std::int8_t> exponents;
    int step = 1;

    friend bool operator==(const GseExponents&, const GseExponents&) = default;
};

namespace detail {

// Shared exponents are stored as signed bytes; deeper subnormals flush.
inline constexpr int kGseMinExponent = -128;

inline GseExponents gse_exponents_for_range(int lo, int hi, const GseLayout& layout) {
    lo = std::max(lo, kGseMinExponent);
    hi = std::max(hi, lo);
    const int range = hi - lo;
    int step = layout.base_step();
    auto entries = [&](int s) { return static_cast<std::size_t>((range + s - 1) / s) + 1; };
    while (range > 0 && entries(step) > layout.max_entries()) ++step;

    GseExponents out;
    out.step = step;
    for (int e = lo; e < hi; e += step) out.exponents.push_back(static_cast<std::int8_t>(e));
    out.exponents.push_back(static_cast<std::int8_t>(hi));
    return out;
}

}  // namespace detail

/// Shared-exponent array covering the exponent range of a chunk's nonzero
/// elements: Emin, Emin+step, ... capped by Emax, so the largest exponent is
/// always present. The step starts at m_bits-1 and is widened to the smallest
/// value that keeps the array within 2^e_bits entries.
///
/// Throws InvalidArgument when every element is zero.
inline GseExponents build_gse_exponent_array(std::span<const Bf16> values, const GseLayout& layout) {
    layout.validate();
    std::optional<int> lo, hi;
    for (Bf16 v : values) {
        if (v.is_zero()) continue;
        const int e = v.normalized_exponent();
        lo = lo ? std::min(*lo, e) : e;
        hi = hi ? std::max(*hi, e) : e;
    }
    if (!lo) throw InvalidArgument("build_gse_exponent_array: chunk has no nonzero element");
    return detail::gse_exponents_for_range(*lo, *hi, layout);
}

/// Encode one value against a shared-exponent array.
///
/// Exponents above the array saturate (largest shared exponent, all-ones
/// fraction). Exponents whose gap to the selected shared exponent leaves no
/// room for the marker bit flush to zero. Low fraction bits are truncated.
inline std::uint8_t gse8_encode_value(Bf16 v, std::span<const std::int8_t> exponents,
                                      const GseLayout& layout) {
    if (v.is_zero()) return 0;
    const int m = layout.m_bits;
    const std::uint8_t sign = v.sign() ? 0x80 : 0x00;
    const int e = v.normalized_exponent();

    if (e > exponents.back()) {
        const auto index = static_cast<int>(exponents.size() - 1);
        return static_cast<std::uint8_t>(sign | (index << m) | ((1 << m) - 1));
    }
    const auto it = std::lower_bound(exponents.begin(), exponents.end(), e);
    const auto index = static_cast<int>(it - exponents.begin());
    const int shift = *it - e;
    if (shift >= m) return 0;

    const int kept = m - 1 - shift;  // explicit fraction bits after the marker
    const int marker = 1 << kept;
    const int top_bits = v.normalized_fraction() >> (Bf16::kFractionBits - kept);
    return static_cast<std::uint8_t>(sign | (index << m) | marker | top_bits);
}

/// Exact value of a GSE-8 byte. Throws ParseError (offset = position) if the
/// index does not address the array.
inline double gse8_decode_value(std::uint8_t byte, std::span<const std::int8_t> exponents,
                                const GseLayout& layout, std::size_t position = 0) {
    const int m = layout.m_bits;
    const int field = byte & ((1 << m) - 1);
    const auto index = static_cast<std::size_t>((byte & 0x7F) >> m);
    if (index >= exponents.size()) {
        throw ParseError("gse8: shared exponent index out of range", position);
    }
    if (field == 0) return 0.0;

    const int shift = m - std::bit_width(static_cast<unsigned>(field));
    const int kept = m - 1 - shift;
    const int frac = field & ((1 << kept) - 1);
    const double mag = std::ldexp(static_cast<double>((1 << kept) | frac),
                                  exponents[index] - shift - kept);
    return (byte & 0x80) ? -mag : mag;
}

}  // namespace kvtier
