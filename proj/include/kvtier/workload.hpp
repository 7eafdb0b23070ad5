#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "kvtier/chunk.hpp"
#include "kvtier/error.hpp"
#include "kvtier/hotness.hpp"
#include "kvtier/random.hpp"

namespace kvtier {

/// A retrieval trace: each query names k distinct chunks.
struct Workload {
    std::vector<std::vector<ChunkId>> queries;
    std::vector<ChunkId> ids;  // every chunk the trace was drawn over
    std::uint64_t seed = 0;
    double zipf_s = 1.1;
    std::size_t k = 1;

    std::size_t access_count() const {
        std::size_t n = 0;
        for (const auto& q : queries) n += q.size();
        return n;
    }

    friend bool operator==(const Workload&, const Workload&) = default;
};

namespace detail {

// Weighted sampling of k distinct ranks. Small k uses rejection on the CDF;
// otherwise (or if rejection stalls) exponential-key sampling, which draws
// from the same successive-sampling distribution.
inline std::vector<std::size_t> sample_distinct(Rng& rng, std::span<const double> cdf,
                                                std::span<const double> weights, std::size_t k) {
    const std::size_t n = cdf.size();
    std::vector<std::size_t> picked;
    picked.reserve(k);
    if (k == n) {
        picked.resize(n);
        std::iota(picked.begin(), picked.end(), std::size_t{0});
        return picked;
    }
    if (4 * k <= n) {
        std::vector<bool> taken(n, false);
        const double total = cdf.back();
        for (std::size_t attempts = 0; picked.size() < k && attempts < 64 * k; ++attempts) {
            const double u = rng.uniform() * total;
            auto r = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            r = std::min(r, n - 1);
            if (!taken[r]) {
                taken[r] = true;
                picked.push_back(r);
            }
        }
        if (picked.size() == k) return picked;
        picked.clear();
    }
    std::vector<std::pair<double, std::size_t>> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = {std::log(rng.uniform_open0()) / weights[i], i};
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                      [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    for (std::size_t i = 0; i < k; ++i) picked.push_back(keys[i].second);
    return picked;
}

}  // namespace detail

/// Zipf-skewed trace over the given chunk ids. Popularity ranks are mapped to
/// ids through a seeded random permutation; zipf_s == 0 is uniform.
inline Workload gen_workload(std::span<const ChunkId> ids, std::size_t query_count, std::size_t k,
                             double zipf_s, std::uint64_t seed) {
    if (ids.empty()) throw InvalidArgument("gen_workload: no chunks");
    if (k == 0 || k > ids.size()) throw InvalidArgument("gen_workload: need 1 <= k <= chunk count");
    if (!(zipf_s >= 0.0) || !std::isfinite(zipf_s)) throw InvalidArgument("gen_workload: zipf exponent must be >= 0");

    Rng rng(seed);
    Workload w;
    w.ids.assign(ids.begin(), ids.end());
    w.seed = seed;
    w.zipf_s = zipf_s;
    w.k = k;

    std::vector<ChunkId> by_rank(ids.begin(), ids.end());
    rng.shuffle(std::span<ChunkId>(by_rank));

    std::vector<double> weights(ids.size());
    std::vector<double> cdf(ids.size());
    double acc = 0.0;
    for (std::size_t r = 0; r < ids.size(); ++r) {
        weights[r] = std::pow(static_cast<double>(r + 1), -zipf_s);
        acc += weights[r];
        cdf[r] = acc;
    }

    w.queries.reserve(query_count);
    for (std::size_t q = 0; q < query_count; ++q) {
        std::vector<ChunkId> query;
        query.reserve(k);
        for (std::size_t r : detail::sample_distinct(rng, cdf, weights, k)) query.push_back(by_rank[r]);
        w.queries.push_back(std::move(query));
    }
    return w;
}

/// Trace over ids 0 .. n_chunks-1.
inline Workload gen_workload(std::size_t n_chunks, std::size_t query_count, std::size_t k, double zipf_s,
                             std::uint64_t seed) {
    std::vector<ChunkId> ids(n_chunks);
    std::iota(ids.begin(), ids.end(), ChunkId{0});
    return gen_workload(std::span<const ChunkId>(ids), query_count, k, zipf_s, seed);
}

/// Number of queries that contain each chunk. Every id of the workload's
/// universe is present, with zero if never accessed.
inline AccessProfile profile_from_workload(const Workload& w) {
    AccessProfile p;
    for (ChunkId id : w.ids) p.counts.emplace(id, 0);
    for (const auto& q : w.queries) {
        for (ChunkId id : q) ++p.counts[id];
    }
    return p;
}

}  // namespace kvtier
