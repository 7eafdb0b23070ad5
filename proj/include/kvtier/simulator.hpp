#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kvtier/chunk.hpp"
#include "kvtier/codecs.hpp"
#include "kvtier/error.hpp"
#include "kvtier/placement.hpp"
#include "kvtier/workload.hpp"

namespace kvtier {

/// Relative decode cost per scheme, in compressed bytes per second. The ratios
/// follow the measured decompression times (GSE-8 17.38, INT8 20.23,
/// E5M2 254.72, E4M3 284.86); the absolute level is a free parameter.
inline constexpr double kGseDecodeRate = 40e9;
inline constexpr std::array<double, 4> kDefaultDecodeRates = {
    kGseDecodeRate * 17.38 / 20.23,   // Int8
    kGseDecodeRate * 17.38 / 284.86,  // E4M3
    kGseDecodeRate * 17.38 / 254.72,  // E5M2
    kGseDecodeRate,                   // Gse8
};

struct CostModel {
    // Indexed by Link: disk->pageable, pageable->pinned, pinned->GPU.
    std::array<double, 3> bandwidth = {2e9, 10e9, 25e9};
    std::array<double, 3> latency = {50e-6, 50e-6, 50e-6};
    // Indexed by Scheme.
    std::array<double, 4> decode_rate = kDefaultDecodeRates;
    double gpu_access_time = 1e-6;
    // When set, the tiered pipeline moves uncompressed BF16 and never decodes.
    bool baseline = false;

    void validate() const {
        for (double b : bandwidth) {
            if (!(b > 0.0)) throw InvalidArgument("cost model: bandwidths must be > 0");
        }
        for (double r : decode_rate) {
            if (!(r > 0.0)) throw InvalidArgument("cost model: decode rates must be > 0");
        }
        for (double l : latency) {
            if (!(l >= 0.0)) throw InvalidArgument("cost model: latencies must be >= 0");
        }
        if (!(gpu_access_time >= 0.0)) throw InvalidArgument("cost model: gpu access time must be >= 0");
    }

    double transfer_time(Link link, std::uint64_t bytes) const {
        const auto i = static_cast<std::size_t>(link);
        return latency[i] + static_cast<double>(bytes) / bandwidth[i];
    }

    double decode_time(Scheme s, std::uint64_t bytes) const {
        return static_cast<double>(bytes) / decode_rate[scheme_index(s)];
    }
};

/// Size and codec of one stored chunk, all the simulator needs to know.
struct StoredChunk {
    ChunkId id = 0;
    std::uint64_t bf16_bytes = 0;
    std::uint64_t compressed_bytes = 0;
    Scheme scheme = Scheme::Gse8;
};

inline StoredChunk describe(const CompressedChunk& c) {
    return {c.id, c.bf16_bytes(), c.compressed_bytes(), c.scheme};
}

/// Per-chunk cost lookup: stored bytes and, for compressed data, the scheme to
/// decode. A missing scheme means BF16 (no decode).
struct ChunkCost {
    std::uint64_t bytes = 0;
    std::optional<Scheme> scheme;
};

using CostTable = std::unordered_map<ChunkId, ChunkCost>;

/// Load latency of one query from its access outcomes. GPU hits cost the
/// model's access time; every other hit pays its transfer legs plus one
/// decode of the chunk.
inline double query_latency(std::span<const AccessOutcome> outcomes, const CostTable& sizes,
                            const CostModel& model) {
    double total = 0.0;
    for (const AccessOutcome& o : outcomes) {
        if (o.hit_tier == Tier::Gpu) {
            total += model.gpu_access_time;
            continue;
        }
        for (const Transfer& t : o.transfers) total += model.transfer_time(t.link, t.bytes);
        const auto it = sizes.find(o.id);
        if (it == sizes.end()) throw InvalidArgument("query_latency: no size for chunk " + std::to_string(o.id));
        if (it->second.scheme) total += model.decode_time(*it->second.scheme, it->second.bytes);
    }
    return total;
}

struct QueryRecord {
    double ha_latency = 0.0;        // seconds
    double baseline_latency = 0.0;  // seconds
    double speedup = 0.0;
    std::array<std::uint64_t, 4> hits{};  // indexed by Tier
};

struct SimSummary {
    double mean_ha_latency = 0.0;
    double mean_baseline_latency = 0.0;
    double mean_speedup = 0.0;
    double max_speedup = 0.0;
    double first_half_mean_speedup = 0.0;
    double second_half_mean_speedup = 0.0;
};

struct SimReport {
    std::vector<QueryRecord> queries;
    std::array<std::uint64_t, 4> hits{};         // indexed by Tier
    std::array<std::uint64_t, 3> link_bytes{};   // indexed by Link
    SimSummary summary;

    std::uint64_t total_hits() const {
        std::uint64_t n = 0;
        for (auto h : hits) n += h;
        return n;
    }
};

struct SimOptions {
    // Queue capacities; defaults to the tier list sizes.
    std::optional<TierCapacities> capacities;
};

namespace detail {

inline SimSummary summarize(std::span<const QueryRecord> q) {
    SimSummary s;
    if (q.empty()) return s;
    auto mean = [](auto first, auto last, auto field) {
        double acc = 0.0;
        std::size_t n = 0;
        for (auto it = first; it != last; ++it, ++n) acc += field(*it);
        return n == 0 ? 0.0 : acc / static_cast<double>(n);
    };
    const auto speed = [](const QueryRecord& r) { return r.speedup; };
    s.mean_ha_latency = mean(q.begin(), q.end(), [](const QueryRecord& r) { return r.ha_latency; });
    s.mean_baseline_latency = mean(q.begin(), q.end(), [](const QueryRecord& r) { return r.baseline_latency; });
    s.mean_speedup = mean(q.begin(), q.end(), speed);
    for (const auto& r : q) s.max_speedup = std::max(s.max_speedup, r.speedup);
    const auto mid = q.begin() + static_cast<std::ptrdiff_t>(q.size() / 2);
    s.first_half_mean_speedup = mean(q.begin(), mid, speed);
    s.second_half_mean_speedup = mean(mid, q.end(), speed);
    return s;
}

}  // namespace detail

/// Replay a workload through the tiered placement state and price every query
/// against the baseline, which loads uncompressed BF16 from disk on every
/// access with no caching.
inline SimReport run(std::span<const StoredChunk> chunks, const Workload& workload,
                     const TierListAssignment& lists, const CostModel& model, const SimOptions& opts = {}) {
    model.validate();
    std::unordered_map<ChunkId, const StoredChunk*> by_id;
    for (const auto& c : chunks) {
        if (!by_id.emplace(c.id, &c).second) throw InvalidArgument("run: duplicate chunk id " + std::to_string(c.id));
        if (!lists.contains(c.id)) throw InvalidArgument("run: chunk " + std::to_string(c.id) + " missing from tier lists");
    }
    if (lists.tier_of.size() != by_id.size()) throw InvalidArgument("run: tier lists name chunks not in the store");

    CostTable ha_costs;
    CostTable baseline_costs;
    for (const auto& c : chunks) {
        if (model.baseline) ha_costs[c.id] = {c.bf16_bytes, std::nullopt};
        else ha_costs[c.id] = {c.compressed_bytes, c.scheme};
        baseline_costs[c.id] = {c.bf16_bytes, std::nullopt};
    }

    PlacementState state = opts.capacities ? PlacementState(lists, *opts.capacities) : PlacementState(lists);
    SimReport report;
    report.queries.reserve(workload.queries.size());
    std::vector<AccessOutcome> ha_outcomes;
    std::vector<AccessOutcome> base_outcomes;

    for (const auto& query : workload.queries) {
        ha_outcomes.clear();
        base_outcomes.clear();
        QueryRecord rec;
        for (ChunkId id : query) {
            if (!by_id.count(id)) throw InvalidArgument("run: workload names unknown chunk " + std::to_string(id));
            AccessOutcome o = state.access(id, ha_costs[id].bytes);
            ++rec.hits[static_cast<std::size_t>(o.hit_tier)];
            for (const auto& t : o.transfers) report.link_bytes[static_cast<std::size_t>(t.link)] += t.bytes;
            ha_outcomes.push_back(std::move(o));

            const std::uint64_t b = baseline_costs[id].bytes;
            base_outcomes.push_back(
                {id, Tier::Disk, {{Link::DiskToPage, b}, {Link::PageToPin, b}, {Link::PinToGpu, b}}, {}});
        }
        rec.ha_latency = query_latency(ha_outcomes, ha_costs, model);
        rec.baseline_latency = query_latency(base_outcomes, baseline_costs, model);
        rec.speedup = rec.baseline_latency / rec.ha_latency;
        for (std::size_t t = 0; t < 4; ++t) report.hits[t] += rec.hits[t];
        report.queries.push_back(rec);
    }
    report.summary = detail::summarize(report.queries);
    return report;
}

enum class AblationMode { MpOnly, DpNoPin, DpPinOnly, DpOnly, Full };

constexpr std::string_view to_string(AblationMode m) noexcept {
    switch (m) {
        case AblationMode::MpOnly: return "mp-only";
        case AblationMode::DpNoPin: return "dp-no-pin";
        case AblationMode::DpPinOnly: return "dp-pin-only";
        case AblationMode::DpOnly: return "dp-only";
        case AblationMode::Full: return "full";
    }
    return "?";
}

inline std::optional<AblationMode> parse_ablation_mode(std::string_view s) {
    for (auto m : {AblationMode::MpOnly, AblationMode::DpNoPin, AblationMode::DpPinOnly, AblationMode::DpOnly,
                   AblationMode::Full}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

/// Run one ablation arm. MP modes move compressed payloads; DP-only modes move
/// BF16. Disabled queues get zero capacity; the tier lists stay the same.
inline SimReport ablation(std::span<const StoredChunk> chunks, const Workload& workload,
                          const TierListAssignment& lists, CostModel model, AblationMode mode,
                          std::optional<TierCapacities> capacities = std::nullopt) {
    TierCapacities caps = capacities.value_or(
        TierCapacities{lists.gpu_list.size(), lists.pin_list.size(), lists.page_list.size()});
    switch (mode) {
        case AblationMode::MpOnly: caps = {0, 0, 0}; break;
        case AblationMode::DpNoPin: caps.pin = 0; break;
        case AblationMode::DpPinOnly: caps.gpu = 0; caps.page = 0; break;
        case AblationMode::DpOnly:
        case AblationMode::Full: break;
    }
    const bool compressed = mode == AblationMode::MpOnly || mode == AblationMode::Full;
    model.baseline = model.baseline || !compressed;
    return run(chunks, workload, lists, model, SimOptions{caps});
}

}  // namespace kvtier
