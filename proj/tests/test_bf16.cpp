#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "kvtier/bf16.hpp"
#include "kvtier/chunk.hpp"
#include "oracles.hpp"

using kvtier::Bf16;
using kvtier::bf16_from_real;
using kvtier::bf16_to_real;

TEST(Bf16, ExactValues) {
    EXPECT_EQ(bf16_from_real(1.0).bits(), 0x3F80);
    EXPECT_EQ(bf16_from_real(0.0).bits(), 0x0000);
    EXPECT_EQ(bf16_from_real(-0.0).bits(), 0x8000);
    EXPECT_EQ(bf16_to_real(Bf16::from_bits(0x3F80)), 1.0);
    EXPECT_EQ(bf16_to_real(Bf16::from_bits(0xC000)), -2.0);
    EXPECT_EQ(bf16_to_real(Bf16::from_bits(0x0001)), std::ldexp(1.0, -133));
}

TEST(Bf16, PointOneMatchesExhaustiveSearch) {
    const std::uint16_t expected = oracle::nearest_bf16(0.1);
    EXPECT_EQ(expected, 0x3DCD);  // frozen from the exhaustive search
    EXPECT_EQ(bf16_from_real(0.1).bits(), expected);
}

TEST(Bf16, RoundingMatchesExhaustiveSearchOnSamples) {
    // Midpoints between neighbours exercise ties-to-even; offsets exercise
    // ordinary rounding.
    for (std::uint32_t p = 0x0000; p < 0x7F00; p += 97) {
        const double lo = oracle::bf16_value(static_cast<std::uint16_t>(p));
        const double hi = oracle::bf16_value(static_cast<std::uint16_t>(p + 1));
        for (double x : {lo + (hi - lo) * 0.5, lo + (hi - lo) * 0.26, lo + (hi - lo) * 0.74}) {
            ASSERT_EQ(bf16_from_real(x).bits(), oracle::nearest_bf16(x)) << "x=" << x;
            ASSERT_EQ(bf16_from_real(-x).bits(), oracle::nearest_bf16(-x)) << "x=" << -x;
        }
    }
}

TEST(Bf16, RejectsNonFinite) {
    EXPECT_THROW(bf16_from_real(std::numeric_limits<double>::infinity()), kvtier::InvalidArgument);
    EXPECT_THROW(bf16_from_real(std::numeric_limits<double>::quiet_NaN()), kvtier::InvalidArgument);
    EXPECT_THROW(bf16_from_real(1e39), kvtier::InvalidArgument);
}

TEST(Bf16, EveryFinitePatternRoundTrips) {
    for (std::uint32_t p = 0; p < 0x10000; ++p) {
        const Bf16 v = Bf16::from_bits(static_cast<std::uint16_t>(p));
        if (!v.is_finite()) continue;
        ASSERT_EQ(bf16_to_real(v), oracle::bf16_value(v.bits()));
        ASSERT_EQ(bf16_from_real(bf16_to_real(v)).bits(), v.bits()) << std::hex << p;
    }
}

TEST(Bf16, BitOrderMatchesNumericOrder) {
    for (std::uint32_t p = 0; p + 1 < 0x7F80; ++p) {
        const double a = bf16_to_real(Bf16::from_bits(static_cast<std::uint16_t>(p)));
        const double b = bf16_to_real(Bf16::from_bits(static_cast<std::uint16_t>(p + 1)));
        ASSERT_LT(a, b);
        const double na = bf16_to_real(Bf16::from_bits(static_cast<std::uint16_t>(p | 0x8000)));
        const double nb = bf16_to_real(Bf16::from_bits(static_cast<std::uint16_t>((p + 1) | 0x8000)));
        ASSERT_GT(na, nb);
    }
}

TEST(Bf16, NormalizedExponentOfSubnormals) {
    EXPECT_EQ(Bf16::from_bits(0x0001).normalized_exponent(), -133);
    EXPECT_EQ(Bf16::from_bits(0x0001).exponent(), -126);
    EXPECT_EQ(Bf16::from_bits(0x0040).normalized_exponent(), -127);
    EXPECT_EQ(Bf16::from_bits(0x0041).normalized_fraction(), 0x02);
    for (std::uint16_t p = 1; p < 0x80; ++p) {
        const Bf16 v = Bf16::from_bits(p);
        const double rebuilt = std::ldexp(1.0 + v.normalized_fraction() / 128.0, v.normalized_exponent());
        ASSERT_EQ(rebuilt, bf16_to_real(v));
    }
}

TEST(KvChunk, ValidatesShapeAndFiniteness) {
    using kvtier::ChunkKind;
    using kvtier::KvChunk;
    EXPECT_THROW(KvChunk(0, ChunkKind::Key, 2, 2, std::vector<Bf16>(3)), kvtier::InvalidArgument);
    EXPECT_THROW(KvChunk(0, ChunkKind::Key, 0, 2, {}), kvtier::InvalidArgument);
    EXPECT_THROW(KvChunk(0, ChunkKind::Key, 1, 1, {Bf16::from_bits(0x7F80)}), kvtier::InvalidArgument);
    const KvChunk ok(7, ChunkKind::Value, 2, 3, std::vector<Bf16>(6));
    EXPECT_EQ(ok.bf16_bytes(), 12u);
    EXPECT_EQ(ok.id(), 7u);
}
