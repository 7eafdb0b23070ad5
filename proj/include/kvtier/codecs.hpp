#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "kvtier/bf16.hpp"
#include "kvtier/chunk.hpp"
#include "kvtier/error.hpp"
#include "kvtier/fp8.hpp"
#include "kvtier/gse.hpp"

namespace kvtier {

struct Int8Meta {
    float scale = 1.0f;
    friend bool operator==(const Int8Meta&, const Int8Meta&) = default;
};

using GseMeta = GseExponents;

using SchemeMeta = std::variant<std::monostate, Int8Meta, GseMeta>;

/// A chunk after 8-bit compression: one payload byte per element plus the
/// per-scheme metadata needed to decode it.
struct CompressedChunk {
    ChunkId id = 0;
    ChunkKind kind = ChunkKind::Key;
    Scheme scheme = Scheme::Int8;
    std::uint32_t token_count = 0;
    std::uint32_t width = 0;
    std::vector<std::uint8_t> payload;
    SchemeMeta meta;

    std::size_t element_count() const noexcept {
        return static_cast<std::size_t>(token_count) * width;
    }

    std::size_t bf16_bytes() const noexcept { return element_count() * 2; }

    // Int8: f32 scale. Gse8: entry count, step, one signed byte per entry.
    std::size_t meta_bytes() const noexcept {
        if (std::holds_alternative<Int8Meta>(meta)) return 4;
        if (const auto* g = std::get_if<GseMeta>(&meta)) return 2 + g->exponents.size();
        return 0;
    }

    std::size_t compressed_bytes() const noexcept { return payload.size() + meta_bytes(); }

    double compression_ratio() const noexcept {
        return static_cast<double>(bf16_bytes()) / static_cast<double>(compressed_bytes());
    }

    friend bool operator==(const CompressedChunk&, const CompressedChunk&) = default;
};

namespace detail {

inline CompressedChunk shell_of(const KvChunk& chunk, Scheme scheme) {
    CompressedChunk c;
    c.id = chunk.id();
    c.kind = chunk.kind();
    c.scheme = scheme;
    c.token_count = chunk.token_count();
    c.width = chunk.width();
    c.payload.reserve(chunk.size());
    return c;
}

inline void expect_scheme(const CompressedChunk& c, Scheme want, const char* op) {
    if (c.scheme != want) {
        throw InvalidArgument(std::string(op) + ": scheme mismatch (chunk holds " +
                              std::string(to_string(c.scheme)) + ")");
    }
}

inline KvChunk rebuild(const CompressedChunk& c, std::vector<Bf16> data) {
    return KvChunk(c.id, c.kind, c.token_count, c.width, std::move(data));
}

inline const Fp8Format& fp8_format(Scheme s) {
    if (s == Scheme::Fp8E4M3) return kE4M3;
    if (s == Scheme::Fp8E5M2) return kE5M2;
    throw InvalidArgument("not an FP8 scheme: " + std::string(to_string(s)));
}

}  // namespace detail

/// Symmetric per-chunk absmax quantization: scale = max|x| / 127 and
/// q = round_half_even(x / scale), so -128 is never produced.
/// An all-zero chunk uses scale 1.
inline CompressedChunk encode_int8(const KvChunk& chunk) {
    auto c = detail::shell_of(chunk, Scheme::Int8);
    double absmax = 0.0;
    for (Bf16 v : chunk.data()) absmax = std::max(absmax, std::fabs(bf16_to_real(v)));

    if (absmax == 0.0) {
        c.payload.assign(chunk.size(), 0);
        c.meta = Int8Meta{1.0f};
        return c;
    }
    for (Bf16 v : chunk.data()) {
        // x * 127 is exact in double; one rounding in the division.
        const double q = std::nearbyint(bf16_to_real(v) * 127.0 / absmax);
        const auto clamped = static_cast<std::int8_t>(std::clamp(q, -127.0, 127.0));
        c.payload.push_back(static_cast<std::uint8_t>(clamped));
    }
    c.meta = Int8Meta{static_cast<float>(absmax / 127.0)};
    return c;
}

inline KvChunk decode_int8(const CompressedChunk& c) {
    detail::expect_scheme(c, Scheme::Int8, "decode_int8");
    const auto* meta = std::get_if<Int8Meta>(&c.meta);
    if (meta == nullptr || !(meta->scale > 0.0f)) throw InvalidArgument("decode_int8: missing or invalid scale");
    std::vector<Bf16> out;
    out.reserve(c.payload.size());
    for (std::uint8_t b : c.payload) {
        const auto q = static_cast<std::int8_t>(b);
        out.push_back(bf16_from_real(static_cast<double>(q) * static_cast<double>(meta->scale)));
    }
    return detail::rebuild(c, std::move(out));
}

/// Round-to-nearest-even FP8 conversion, saturating on overflow.
inline CompressedChunk encode_fp8(const KvChunk& chunk, Scheme variant) {
    const Fp8Format& fmt = detail::fp8_format(variant);
    auto c = detail::shell_of(chunk, variant);
    for (Bf16 v : chunk.data()) c.payload.push_back(fp8_from_bf16(v, fmt));
    return c;
}

inline KvChunk decode_fp8(const CompressedChunk& c) {
    if (c.scheme != Scheme::Fp8E4M3 && c.scheme != Scheme::Fp8E5M2) {
        throw InvalidArgument("decode_fp8: scheme mismatch (chunk holds " +
                              std::string(to_string(c.scheme)) + ")");
    }
    const Fp8Format& fmt = detail::fp8_format(c.scheme);
    std::vector<Bf16> out;
    out.reserve(c.payload.size());
    for (std::size_t i = 0; i < c.payload.size(); ++i) {
        if (!fmt.is_finite_code(c.payload[i])) throw ParseError("decode_fp8: non-finite code", i);
        out.push_back(fp8_to_bf16(c.payload[i], fmt));
    }
    return detail::rebuild(c, std::move(out));
}

/// GSE-8 with a per-chunk shared-exponent array stored in the metadata.
/// An all-zero chunk gets the single-entry array [0] and an all-zero payload.
inline CompressedChunk encode_gse8(const KvChunk& chunk, const GseLayout& layout = {}) {
    layout.validate();
    auto c = detail::shell_of(chunk, Scheme::Gse8);
    const bool all_zero = std::all_of(chunk.data().begin(), chunk.data().end(),
                                      [](Bf16 v) { return v.is_zero(); });
    GseMeta meta = all_zero ? GseMeta{{0}, layout.base_step()}
                            : build_gse_exponent_array(chunk.data(), layout);
    for (Bf16 v : chunk.data()) c.payload.push_back(gse8_encode_value(v, meta.exponents, layout));
    c.meta = std::move(meta);
    return c;
}

inline KvChunk decode_gse8(const CompressedChunk& c, const GseLayout& layout = {}) {
    detail::expect_scheme(c, Scheme::Gse8, "decode_gse8");
    const auto* meta = std::get_if<GseMeta>(&c.meta);
    if (meta == nullptr || meta->exponents.empty()) throw InvalidArgument("decode_gse8: missing shared exponents");
    std::vector<Bf16> out;
    out.reserve(c.payload.size());
    for (std::size_t i = 0; i < c.payload.size(); ++i) {
        out.push_back(bf16_from_real(gse8_decode_value(c.payload[i], meta->exponents, layout, i)));
    }
    return detail::rebuild(c, std::move(out));
}

inline CompressedChunk compress(const KvChunk& chunk, Scheme scheme, const GseLayout& layout = {}) {
    switch (scheme) {
        case Scheme::Int8: return encode_int8(chunk);
        case Scheme::Fp8E4M3:
        case Scheme::Fp8E5M2: return encode_fp8(chunk, scheme);
        case Scheme::Gse8: return encode_gse8(chunk, layout);
    }
    throw InternalError("compress: unknown scheme");
}

inline KvChunk decompress(const CompressedChunk& c, const GseLayout& layout = {}) {
    switch (c.scheme) {
        case Scheme::Int8: return decode_int8(c);
        case Scheme::Fp8E4M3:
        case Scheme::Fp8E5M2: return decode_fp8(c);
        case Scheme::Gse8: return decode_gse8(c, layout);
    }
    throw InternalError("decompress: unknown scheme");
}

}  // namespace kvtier
