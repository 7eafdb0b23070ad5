#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "kvtier/chunk.hpp"
#include "kvtier/error.hpp"

namespace kvtier {

struct RangeSummary {
    double min = 0.0;
    double max = 0.0;
    ChunkKind kind = ChunkKind::Key;
};

/// Occurrence count per unbiased BF16 exponent, over nonzero elements only.
struct ExponentHistogram {
    std::map<int, std::uint64_t> counts;
    std::uint64_t total_nonzero = 0;
};

inline RangeSummary value_range(const KvChunk& chunk) {
    RangeSummary r{bf16_to_real(chunk.data().front()), bf16_to_real(chunk.data().front()), chunk.kind()};
    for (Bf16 v : chunk.data()) {
        const double x = bf16_to_real(v);
        r.min = std::min(r.min, x);
        r.max = std::max(r.max, x);
    }
    return r;
}

// Subnormals fall in the -126 bucket (their stored exponent).
inline ExponentHistogram exponent_histogram(const KvChunk& chunk) {
    ExponentHistogram h;
    for (Bf16 v : chunk.data()) {
        if (v.is_zero()) continue;
        ++h.counts[v.exponent()];
        ++h.total_nonzero;
    }
    return h;
}

/// Fraction of nonzero elements covered by the k most frequent exponents.
/// Ties between equal counts go to the smaller exponent.
inline double topk_coverage(const ExponentHistogram& h, std::size_t k) {
    if (k == 0) throw InvalidArgument("topk_coverage: k must be >= 1");
    if (h.total_nonzero == 0) return 0.0;
    std::vector<std::pair<int, std::uint64_t>> entries(h.counts.begin(), h.counts.end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < entries.size() && i < k; ++i) covered += entries[i].second;
    return static_cast<double>(covered) / static_cast<double>(h.total_nonzero);
}

/// Root-mean-square error between two equally sized chunks, accumulated in
/// long double.
inline double rmse(const KvChunk& original, const KvChunk& reconstructed) {
    if (original.size() != reconstructed.size()) {
        throw InvalidArgument("rmse: chunk lengths differ");
    }
    long double sum = 0.0L;
    const auto a = original.data();
    const auto b = reconstructed.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(bf16_to_real(a[i])) - bf16_to_real(b[i]);
        sum += d * d;
    }
    return static_cast<double>(std::sqrt(sum / static_cast<long double>(a.size())));
}

}  // namespace kvtier
