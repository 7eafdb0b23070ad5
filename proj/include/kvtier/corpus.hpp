#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kvtier/bf16.hpp"
#include "kvtier/chunk.hpp"
#include "kvtier/error.hpp"
#include "kvtier/random.hpp"

namespace kvtier {

/// Shape of the synthetic value distributions. Each channel (column) draws a
/// standard deviation around the base; elements are Gaussian and clipped to
/// the open interval (-bound, bound).
struct CorpusDistribution {
    double key_sigma = 4.0;
    double value_sigma = 1.5;
    double channel_spread = 0.4;  // channel sigma in base * [1 - spread, 1 + spread]
    double key_bound = 25.0;
    double value_bound = 10.0;
};

namespace detail {

// Largest BF16 strictly below `bound`.
inline double below_bound(double bound) {
    Bf16 b = bf16_from_real(bound);
    if (bf16_to_real(b) >= bound) b = Bf16::from_bits(static_cast<std::uint16_t>(b.bits() - 1));
    return bf16_to_real(b);
}

inline std::vector<Bf16> gen_tensor(Rng& rng, std::uint32_t tokens, std::uint32_t width, double sigma,
                                    double spread, double bound) {
    std::vector<double> channel(width);
    for (auto& s : channel) s = sigma * rng.uniform(1.0 - spread, 1.0 + spread);
    const double clip = below_bound(bound);
    std::vector<Bf16> data;
    data.reserve(static_cast<std::size_t>(tokens) * width);
    for (std::uint32_t t = 0; t < tokens; ++t) {
        for (std::uint32_t c = 0; c < width; ++c) {
            const double x = std::clamp(rng.normal(0.0, channel[c]), -clip, clip);
            data.push_back(bf16_from_real(x));
        }
    }
    return data;
}

}  // namespace detail

/// Two chunks per document: Key with id 2d, Value with id 2d+1.
inline std::vector<KvChunk> gen_corpus(std::uint32_t n_docs, std::uint32_t tokens_per_chunk,
                                       std::uint32_t width, std::uint64_t seed,
                                       const CorpusDistribution& dist = {}) {
    if (n_docs == 0 || tokens_per_chunk == 0 || width == 0) {
        throw InvalidArgument("gen_corpus: docs, tokens and width must be >= 1");
    }
    Rng rng(seed);
    std::vector<KvChunk> corpus;
    corpus.reserve(2 * static_cast<std::size_t>(n_docs));
    for (std::uint32_t d = 0; d < n_docs; ++d) {
        corpus.emplace_back(2 * d, ChunkKind::Key, tokens_per_chunk, width,
                            detail::gen_tensor(rng, tokens_per_chunk, width, dist.key_sigma,
                                               dist.channel_spread, dist.key_bound));
        corpus.emplace_back(2 * d + 1, ChunkKind::Value, tokens_per_chunk, width,
                            detail::gen_tensor(rng, tokens_per_chunk, width, dist.value_sigma,
                                               dist.channel_spread, dist.value_bound));
    }
    return corpus;
}

}  // namespace kvtier
