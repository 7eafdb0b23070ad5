#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kvtier/bf16.hpp"
#include "kvtier/error.hpp"

namespace kvtier {

using ChunkId = std::uint32_t;

enum class ChunkKind : std::uint8_t { Key = 0, Value = 1 };

/// Compression schemes in hotness order: index 0 is used for the hottest group.
enum class Scheme : std::uint8_t { Int8 = 0, Fp8E4M3 = 1, Fp8E5M2 = 2, Gse8 = 3 };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::Int8, Scheme::Fp8E4M3,
                                                      Scheme::Fp8E5M2, Scheme::Gse8};

constexpr std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::Int8: return "int8";
        case Scheme::Fp8E4M3: return "e4m3";
        case Scheme::Fp8E5M2: return "e5m2";
        case Scheme::Gse8: return "gse8";
    }
    return "?";
}

constexpr std::string_view to_string(ChunkKind k) noexcept {
    return k == ChunkKind::Key ? "key" : "value";
}

constexpr std::size_t scheme_index(Scheme s) noexcept { return static_cast<std::size_t>(s); }

/// A precomputed Key or Value tensor for one document segment, stored flat.
///
/// Construction validates the shape and rejects NaN/Inf elements, so every
/// KvChunk in the program is finite with data().size() == token_count * width.
class KvChunk {
public:
    KvChunk(ChunkId id, ChunkKind kind, std::uint32_t token_count, std::uint32_t width,
            std::vector<Bf16> data)
        : id_(id), kind_(kind), token_count_(token_count), width_(width), data_(std::move(data)) {
        if (token_count_ == 0 || width_ == 0) {
            throw InvalidArgument("KvChunk: token_count and width must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(token_count_) * width_) {
            throw InvalidArgument("KvChunk: data length does not equal token_count * width");
        }
        for (Bf16 v : data_) {
            if (!v.is_finite()) throw InvalidArgument("KvChunk: non-finite element");
        }
    }

    /// Convenience for tests and small examples: a single-token chunk of reals.
    static KvChunk from_reals(ChunkId id, ChunkKind kind, std::span<const double> values) {
        std::vector<Bf16> data;
        data.reserve(values.size());
        for (double x : values) data.push_back(bf16_from_real(x));
        const auto width = static_cast<std::uint32_t>(data.size());
        return KvChunk(id, kind, 1, width, std::move(data));
    }

    ChunkId id() const noexcept { return id_; }
    ChunkKind kind() const noexcept { return kind_; }
    std::uint32_t token_count() const noexcept { return token_count_; }
    std::uint32_t width() const noexcept { return width_; }
    std::span<const Bf16> data() const noexcept { return data_; }
    std::size_t size() const noexcept { return data_.size(); }

    /// Storage footprint of the uncompressed chunk.
    std::size_t bf16_bytes() const noexcept { return data_.size() * sizeof(std::uint16_t); }

    std::vector<double> to_reals() const {
        std::vector<double> out;
        out.reserve(data_.size());
        for (Bf16 v : data_) out.push_back(bf16_to_real(v));
        return out;
    }

    friend bool operator==(const KvChunk&, const KvChunk&) = default;

private:
    ChunkId id_;
    ChunkKind kind_;
    std::uint32_t token_count_;
    std::uint32_t width_;
    std::vector<Bf16> data_;
};

}  // namespace kvtier
