#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kvtier/analysis.hpp"
#include "kvtier/codecs.hpp"
#include "kvtier/error.hpp"
#include "kvtier/hotness.hpp"
#include "kvtier/io.hpp"
#include "kvtier/placement.hpp"
#include "kvtier/simulator.hpp"
#include "kvtier/workload.hpp"

namespace kvtier {

/// Everything a pipeline run can be configured with. Defaults: 10/10/10%
/// compression thresholds, 5/5/10% placement thresholds.
struct RunConfig {
    double tau1 = 0.10;
    double tau2 = 0.10;
    double tau3 = 0.10;
    double tau_gpu = 0.05;
    double tau_pin = 0.05;
    double tau_page = 0.10;

    std::size_t queries = 4096;
    std::size_t k = 8;
    double zipf_s = 1.1;
    std::uint64_t seed = 42;

    std::uint32_t docs = 500;
    std::uint32_t tokens = 512;
    std::uint32_t width = 256;

    GseLayout layout;
    CostModel cost;

    /// Apply one `key=value` setting. Throws InvalidArgument for unknown keys
    /// or unparsable values.
    void set(std::string_view key, std::string_view value);

    void validate() const {
        threshold_boundaries(0, {tau1, tau2, tau3});
        threshold_boundaries(0, {tau_gpu, tau_pin, tau_page});
        if (queries == 0) throw InvalidArgument("queries must be >= 1");
        if (k == 0) throw InvalidArgument("k must be >= 1");
        if (!(zipf_s >= 0.0)) throw InvalidArgument("zipf_s must be >= 0");
        if (docs == 0 || tokens == 0 || width == 0) throw InvalidArgument("docs, tokens and width must be >= 1");
        layout.validate();
        cost.validate();
    }
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidArgument("invalid value '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

inline double parse_real(std::string_view key, std::string_view text) {
    const auto v = parse_number<double>(key, text);
    if (!std::isfinite(v)) throw InvalidArgument("non-finite value for " + std::string(key));
    return v;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

inline const std::map<std::string, Setter, std::less<>>& config_setters() {
    auto real = [](double RunConfig::*field) {
        return Setter([field](RunConfig& c, std::string_view k, std::string_view v) { c.*field = parse_real(k, v); });
    };
    auto size = [](std::size_t RunConfig::*field) {
        return Setter([field](RunConfig& c, std::string_view k, std::string_view v) {
            c.*field = parse_number<std::size_t>(k, v);
        });
    };
    auto u32 = [](std::uint32_t RunConfig::*field) {
        return Setter([field](RunConfig& c, std::string_view k, std::string_view v) {
            c.*field = parse_number<std::uint32_t>(k, v);
        });
    };
    auto cost = [](auto pick) {
        return Setter([pick](RunConfig& c, std::string_view k, std::string_view v) { pick(c.cost) = parse_real(k, v); });
    };
    static const std::map<std::string, Setter, std::less<>> setters = {
        {"tau1", real(&RunConfig::tau1)},
        {"tau2", real(&RunConfig::tau2)},
        {"tau3", real(&RunConfig::tau3)},
        {"tau_gpu", real(&RunConfig::tau_gpu)},
        {"tau_pin", real(&RunConfig::tau_pin)},
        {"tau_page", real(&RunConfig::tau_page)},
        {"queries", size(&RunConfig::queries)},
        {"k", size(&RunConfig::k)},
        {"zipf_s", real(&RunConfig::zipf_s)},
        {"seed", Setter([](RunConfig& c, std::string_view k, std::string_view v) {
             c.seed = parse_number<std::uint64_t>(k, v);
         })},
        {"docs", u32(&RunConfig::docs)},
        {"tokens", u32(&RunConfig::tokens)},
        {"width", u32(&RunConfig::width)},
        {"gse_e_bits", Setter([](RunConfig& c, std::string_view k, std::string_view v) {
             c.layout.e_bits = parse_number<int>(k, v);
         })},
        {"gse_m_bits", Setter([](RunConfig& c, std::string_view k, std::string_view v) {
             c.layout.m_bits = parse_number<int>(k, v);
         })},
        {"bw_disk_page", cost([](CostModel& m) -> double& { return m.bandwidth[0]; })},
        {"bw_page_pin", cost([](CostModel& m) -> double& { return m.bandwidth[1]; })},
        {"bw_pin_gpu", cost([](CostModel& m) -> double& { return m.bandwidth[2]; })},
        {"lat_disk_page", cost([](CostModel& m) -> double& { return m.latency[0]; })},
        {"lat_page_pin", cost([](CostModel& m) -> double& { return m.latency[1]; })},
        {"lat_pin_gpu", cost([](CostModel& m) -> double& { return m.latency[2]; })},
        {"decode_int8", cost([](CostModel& m) -> double& { return m.decode_rate[0]; })},
        {"decode_e4m3", cost([](CostModel& m) -> double& { return m.decode_rate[1]; })},
        {"decode_e5m2", cost([](CostModel& m) -> double& { return m.decode_rate[2]; })},
        {"decode_gse8", cost([](CostModel& m) -> double& { return m.decode_rate[3]; })},
        {"gpu_access_time", cost([](CostModel& m) -> double& { return m.gpu_access_time; })},
    };
    return setters;
}

}  // namespace detail

inline void RunConfig::set(std::string_view key, std::string_view value) {
    const auto& setters = detail::config_setters();
    const auto it = setters.find(key);
    if (it == setters.end()) throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    it->second(*this, key, detail::trim(value));
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : detail::config_setters()) keys.push_back(k);
    return keys;
}

/// Flat `key=value` text, one per line; blank lines and `#` comments ignored.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view l = detail::trim(line);
        if (l.empty() || l.front() == '#') continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        }
        cfg.set(detail::trim(l.substr(0, eq)), l.substr(eq + 1));
    }
}

// ---------------------------------------------------------------------------
// Analysis

struct AnalysisRow {
    ChunkId id = 0;
    ChunkKind kind = ChunkKind::Key;
    double min = 0.0;
    double max = 0.0;
    double top1 = 0.0;
    double top4 = 0.0;
    double top8 = 0.0;
    std::array<double, 4> rmse{};  // indexed by Scheme
};

inline AnalysisRow analyze_chunk(const KvChunk& chunk, const GseLayout& layout = {}) {
    AnalysisRow row;
    row.id = chunk.id();
    row.kind = chunk.kind();
    const auto range = value_range(chunk);
    row.min = range.min;
    row.max = range.max;
    const auto hist = exponent_histogram(chunk);
    row.top1 = topk_coverage(hist, 1);
    row.top4 = topk_coverage(hist, 4);
    row.top8 = topk_coverage(hist, 8);
    for (Scheme s : kAllSchemes) {
        row.rmse[scheme_index(s)] = rmse(chunk, decompress(compress(chunk, s, layout), layout));
    }
    return row;
}

inline std::string encode_analysis_csv(std::span<const AnalysisRow> rows) {
    std::string out = "chunk_id,kind,min,max,top1_coverage,top4_coverage,top8_coverage,rmse_int8,rmse_e4m3,"
                      "rmse_e5m2,rmse_gse8\n";
    for (const auto& r : rows) {
        out += std::to_string(r.id) + "," + std::string(to_string(r.kind)) + "," + format_sig(r.min) + "," +
               format_sig(r.max) + "," + format_real(r.top1) + "," + format_real(r.top4) + "," +
               format_real(r.top8);
        for (double e : r.rmse) out += "," + format_sig(e);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Profiling, compression, simulation

inline std::vector<ChunkId> sorted_ids(std::span<const KvChunk> chunks) {
    std::vector<ChunkId> ids;
    ids.reserve(chunks.size());
    for (const auto& c : chunks) ids.push_back(c.id());
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline std::vector<ChunkId> sorted_ids(std::span<const CompressedChunk> chunks) {
    std::vector<ChunkId> ids;
    ids.reserve(chunks.size());
    for (const auto& c : chunks) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline Workload workload_for(std::span<const ChunkId> ids, const RunConfig& cfg) {
    return gen_workload(ids, cfg.queries, cfg.k, cfg.zipf_s, cfg.seed);
}

/// Restrict a profile to the given ids, failing on the first id it lacks.
inline AccessProfile profile_for(std::span<const ChunkId> ids, const AccessProfile& profile) {
    AccessProfile out;
    for (ChunkId id : ids) {
        const auto it = profile.counts.find(id);
        if (it == profile.counts.end()) {
            throw InvalidArgument("profile has no entry for chunk id " + std::to_string(id));
        }
        out.counts.emplace(id, it->second);
    }
    return out;
}

/// Hotness-partition and compress a corpus. The store is ordered by chunk id.
inline ChunkStore build_store(std::span<const KvChunk> corpus, const AccessProfile& profile, const RunConfig& cfg) {
    cfg.layout.validate();
    const auto ids = sorted_ids(corpus);
    const auto part = partition(sort_by_frequency(profile_for(ids, profile)), cfg.tau1, cfg.tau2, cfg.tau3);
    ChunkStore store;
    store.layout = cfg.layout;
    store.chunks = compress_corpus(corpus, part, cfg.layout);
    std::sort(store.chunks.begin(), store.chunks.end(),
              [](const CompressedChunk& a, const CompressedChunk& b) { return a.id < b.id; });
    return store;
}

/// BF16 bytes over stored bytes, summed across the store.
inline double store_compression_ratio(const ChunkStore& store) {
    std::uint64_t raw = 0;
    std::uint64_t packed = 0;
    for (const auto& c : store.chunks) {
        raw += c.bf16_bytes();
        packed += c.compressed_bytes();
    }
    return packed == 0 ? 0.0 : static_cast<double>(raw) / static_cast<double>(packed);
}

struct SimulationRequest {
    AblationMode mode = AblationMode::Full;
    bool baseline_only = false;
    // Hotness ranking for the tier lists; derived from the replayed workload
    // when absent.
    std::optional<AccessProfile> profile;
};

inline SimReport simulate_store(const ChunkStore& store, const RunConfig& cfg, const SimulationRequest& req = {}) {
    cfg.validate();
    const auto ids = sorted_ids(store.chunks);
    const Workload w = workload_for(ids, cfg);
    const AccessProfile profile = req.profile ? profile_for(ids, *req.profile) : profile_from_workload(w);
    const auto lists = build_lists(sort_by_frequency(profile), cfg.tau_gpu, cfg.tau_pin, cfg.tau_page);

    std::vector<StoredChunk> stored;
    stored.reserve(store.chunks.size());
    for (const auto& c : store.chunks) stored.push_back(describe(c));

    CostModel model = cfg.cost;
    if (req.baseline_only) {
        model.baseline = true;
        return run(stored, w, lists, model, SimOptions{TierCapacities{0, 0, 0}});
    }
    return ablation(stored, w, lists, model, req.mode);
}

}  // namespace kvtier
