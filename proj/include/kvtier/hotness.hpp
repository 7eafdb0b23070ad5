#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kvtier/chunk.hpp"
#include "kvtier/codecs.hpp"
#include "kvtier/error.hpp"

namespace kvtier {

/// Access count per chunk id. Ids absent from the map count as zero.
struct AccessProfile {
    std::map<ChunkId, std::uint64_t> counts;

    std::uint64_t count(ChunkId id) const {
        const auto it = counts.find(id);
        return it == counts.end() ? 0 : it->second;
    }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& [id, c] : counts) t += c;
        return t;
    }
};

/// Ids in descending count order; equal counts are ordered by ascending id.
inline std::vector<ChunkId> sort_by_frequency(const AccessProfile& profile) {
    std::vector<std::pair<ChunkId, std::uint64_t>> entries(profile.counts.begin(), profile.counts.end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<ChunkId> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.first);
    return out;
}

/// Boundaries [idx1, idx2, idx3] for slicing n ranked items by three fractions,
/// each boundary advancing by floor(tau * n). The remainder is the fourth slice.
inline std::array<std::size_t, 3> threshold_boundaries(std::size_t n, std::array<double, 3> taus) {
    double sum = 0.0;
    for (double t : taus) {
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("threshold fractions must lie in [0, 1]");
        sum += t;
    }
    if (sum > 1.0 + 1e-9) throw InvalidArgument("threshold fractions must sum to at most 1");

    std::array<std::size_t, 3> idx{};
    std::size_t at = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        // The epsilon keeps products like 0.29 * 100 from flooring to 28.
        const auto take = static_cast<std::size_t>(std::floor(taus[i] * static_cast<double>(n) + 1e-9));
        at = std::min(n, at + take);
        idx[i] = at;
    }
    return idx;
}

/// Four hotness groups over a ranked id list; group g is compressed with
/// kAllSchemes[g] (INT8 for the hottest, GSE-8 for the coldest).
struct HotnessPartition {
    std::vector<ChunkId> sorted_ids;
    std::array<double, 3> taus{};
    std::array<std::vector<ChunkId>, 4> groups;
    std::unordered_map<ChunkId, Scheme> assignment;

    Scheme scheme_of(ChunkId id) const {
        const auto it = assignment.find(id);
        if (it == assignment.end()) throw InvalidArgument("chunk id " + std::to_string(id) + " missing from partition");
        return it->second;
    }
};

inline HotnessPartition partition(std::span<const ChunkId> sorted, double tau1, double tau2, double tau3) {
    HotnessPartition p;
    p.sorted_ids.assign(sorted.begin(), sorted.end());
    p.taus = {tau1, tau2, tau3};
    const auto idx = threshold_boundaries(sorted.size(), p.taus);
    const std::array<std::size_t, 5> cuts = {0, idx[0], idx[1], idx[2], sorted.size()};
    for (std::size_t g = 0; g < 4; ++g) {
        for (std::size_t i = cuts[g]; i < cuts[g + 1]; ++i) {
            p.groups[g].push_back(sorted[i]);
            p.assignment.emplace(sorted[i], kAllSchemes[g]);
        }
    }
    return p;
}

/// Compress every chunk with the scheme of its hotness group. Output order
/// follows input order.
inline std::vector<CompressedChunk> compress_corpus(std::span<const KvChunk> chunks,
                                                    const HotnessPartition& part,
                                                    const GseLayout& layout = {}) {
    std::vector<CompressedChunk> out;
    out.reserve(chunks.size());
    for (const KvChunk& chunk : chunks) out.push_back(compress(chunk, part.scheme_of(chunk.id()), layout));
    return out;
}

}  // namespace kvtier
