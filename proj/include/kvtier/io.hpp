#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kvtier/analysis.hpp"
#include "kvtier/chunk.hpp"
#include "kvtier/codecs.hpp"
#include "kvtier/error.hpp"
#include "kvtier/hotness.hpp"
#include "kvtier/simulator.hpp"

namespace kvtier {

inline constexpr std::string_view kCorpusMagic = "HKVC";
inline constexpr std::string_view kStoreMagic = "HARG";
inline constexpr std::uint16_t kCorpusVersion = 1;
inline constexpr std::uint16_t kStoreVersion = 1;

/// Little-endian byte sink.
class ByteWriter {
public:
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void bytes(std::span<const std::uint8_t> s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }

    const std::string& data() const noexcept { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::string buf_;
};

/// Little-endian byte source that reports the offset of any short read.
class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::size_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    std::string_view bytes(std::size_t n, const char* what) {
        need(n, what);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(get(1, what)); }
    std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(get(2, what)); }
    std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get(4, what)); }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) throw ParseError(std::string("truncated input reading ") + what, pos_);
    }
    std::uint64_t get(int n, const char* what) {
        need(static_cast<std::size_t>(n), what);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Raw corpus (HKVC): magic, u16 version, then chunks until end of input:
//   id u32, kind u8, token_count u32, width u32, token_count*width BF16 words.

inline std::string encode_corpus(std::span<const KvChunk> chunks) {
    ByteWriter w;
    w.bytes(kCorpusMagic);
    w.u16(kCorpusVersion);
    for (const KvChunk& c : chunks) {
        w.u32(c.id());
        w.u8(static_cast<std::uint8_t>(c.kind()));
        w.u32(c.token_count());
        w.u32(c.width());
        for (Bf16 v : c.data()) w.u16(v.bits());
    }
    return w.take();
}

inline std::vector<KvChunk> decode_corpus(std::string_view data) {
    ByteReader r(data);
    if (r.bytes(4, "magic") != kCorpusMagic) throw ParseError("bad corpus magic", 0);
    const auto version_at = r.offset();
    if (r.u16("version") != kCorpusVersion) throw ParseError("unsupported corpus version", version_at);

    std::vector<KvChunk> chunks;
    std::set<ChunkId> seen;
    while (!r.at_end()) {
        const auto start = r.offset();
        const ChunkId id = r.u32("chunk id");
        const auto kind_at = r.offset();
        const auto kind = r.u8("chunk kind");
        if (kind > 1) throw ParseError("invalid chunk kind", kind_at);
        const auto tokens = r.u32("token count");
        const auto width = r.u32("width");
        if (tokens == 0 || width == 0) throw ParseError("zero token count or width", start);
        const std::uint64_t n = std::uint64_t{tokens} * width;
        if (n * 2 > r.remaining()) throw ParseError("truncated chunk data", r.offset());
        std::vector<Bf16> values;
        values.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto at = r.offset();
            const Bf16 v = Bf16::from_bits(r.u16("element"));
            if (!v.is_finite()) throw ParseError("non-finite element", at);
            values.push_back(v);
        }
        if (!seen.insert(id).second) throw ParseError("duplicate chunk id " + std::to_string(id), start);
        chunks.emplace_back(id, static_cast<ChunkKind>(kind), tokens, width, std::move(values));
    }
    return chunks;
}

// ---------------------------------------------------------------------------
// Compressed store (HARG): magic, u16 version, u32 chunk count, u8 e_bits,
// u8 m_bits, then per chunk:
//   id u32, kind u8, scheme u8, token_count u32, width u32, meta, payload.
// meta: Int8 -> f32 scale; Gse8 -> u8 count, u8 step, count x i8; FP8 -> none.

struct ChunkStore {
    GseLayout layout;
    std::vector<CompressedChunk> chunks;

    friend bool operator==(const ChunkStore&, const ChunkStore&) = default;
};

inline std::string encode_store(const ChunkStore& store) {
    ByteWriter w;
    w.bytes(kStoreMagic);
    w.u16(kStoreVersion);
    w.u32(static_cast<std::uint32_t>(store.chunks.size()));
    w.u8(static_cast<std::uint8_t>(store.layout.e_bits));
    w.u8(static_cast<std::uint8_t>(store.layout.m_bits));
    for (const CompressedChunk& c : store.chunks) {
        w.u32(c.id);
        w.u8(static_cast<std::uint8_t>(c.kind));
        w.u8(static_cast<std::uint8_t>(c.scheme));
        w.u32(c.token_count);
        w.u32(c.width);
        if (const auto* m = std::get_if<Int8Meta>(&c.meta)) {
            w.u32(std::bit_cast<std::uint32_t>(m->scale));
        } else if (const auto* g = std::get_if<GseMeta>(&c.meta)) {
            w.u8(static_cast<std::uint8_t>(g->exponents.size()));
            w.u8(static_cast<std::uint8_t>(g->step));
            for (auto e : g->exponents) w.u8(static_cast<std::uint8_t>(e));
        }
        w.bytes(c.payload);
    }
    return w.take();
}

inline ChunkStore decode_store(std::string_view data) {
    ByteReader r(data);
    if (r.bytes(4, "magic") != kStoreMagic) throw ParseError("bad store magic", 0);
    const auto version_at = r.offset();
    if (r.u16("version") != kStoreVersion) throw ParseError("unsupported store version", version_at);
    const auto count = r.u32("chunk count");
    ChunkStore store;
    const auto layout_at = r.offset();
    store.layout.e_bits = r.u8("gse e_bits");
    store.layout.m_bits = r.u8("gse m_bits");
    try {
        store.layout.validate();
    } catch (const InvalidArgument&) {
        throw ParseError("invalid GSE layout", layout_at);
    }

    std::set<ChunkId> seen;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto start = r.offset();
        CompressedChunk c;
        c.id = r.u32("chunk id");
        const auto kind_at = r.offset();
        const auto kind = r.u8("chunk kind");
        if (kind > 1) throw ParseError("invalid chunk kind", kind_at);
        c.kind = static_cast<ChunkKind>(kind);
        const auto scheme_at = r.offset();
        const auto scheme = r.u8("scheme");
        if (scheme > 3) throw ParseError("invalid scheme tag", scheme_at);
        c.scheme = static_cast<Scheme>(scheme);
        c.token_count = r.u32("token count");
        c.width = r.u32("width");
        if (c.token_count == 0 || c.width == 0) throw ParseError("zero token count or width", start);

        const auto meta_at = r.offset();
        if (c.scheme == Scheme::Int8) {
            const float scale = std::bit_cast<float>(r.u32("int8 scale"));
            if (!(scale > 0.0f) || !std::isfinite(scale)) throw ParseError("invalid int8 scale", meta_at);
            c.meta = Int8Meta{scale};
        } else if (c.scheme == Scheme::Gse8) {
            GseMeta g;
            const auto n = r.u8("gse entry count");
            g.step = r.u8("gse step");
            if (n == 0 || n > store.layout.max_entries() || g.step == 0) {
                throw ParseError("invalid shared exponent header", meta_at);
            }
            for (int j = 0; j < n; ++j) g.exponents.push_back(static_cast<std::int8_t>(r.u8("shared exponent")));
            for (std::size_t j = 1; j < g.exponents.size(); ++j) {
                if (g.exponents[j] <= g.exponents[j - 1]) throw ParseError("shared exponents not ascending", meta_at);
            }
            c.meta = std::move(g);
        }
        const auto payload = r.bytes(c.element_count(), "payload");
        c.payload.assign(payload.begin(), payload.end());
        if (!seen.insert(c.id).second) throw ParseError("duplicate chunk id " + std::to_string(c.id), start);
        store.chunks.push_back(std::move(c));
    }
    if (!r.at_end()) throw ParseError("trailing bytes after last chunk", r.offset());
    return store;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_real(double x, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

inline std::string format_sig(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string encode_profile_csv(const AccessProfile& p) {
    std::string out = "chunk_id,count\n";
    for (const auto& [id, count] : p.counts) out += std::to_string(id) + "," + std::to_string(count) + "\n";
    return out;
}

inline AccessProfile decode_profile_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "chunk_id,count") throw Error("profile: expected header 'chunk_id,count'");
    AccessProfile p;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            std::size_t used = 0;
            const auto id = std::stoull(line.substr(0, comma), &used);
            if (used != comma || id > 0xFFFFFFFFull) throw std::invalid_argument("id");
            const auto rest = line.substr(comma + 1);
            const auto count = std::stoull(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("count");
            if (!p.counts.emplace(static_cast<ChunkId>(id), count).second) throw std::invalid_argument("duplicate id");
        } catch (const std::logic_error&) {
            throw Error("profile: malformed row at line " + std::to_string(lineno) + ": " + line);
        }
    }
    return p;
}

inline constexpr std::string_view kReportHeader =
    "query_idx,ha_latency_us,baseline_latency_us,speedup,gpu_hits,pin_hits,page_hits,disk_loads";

inline std::string encode_report_csv(const SimReport& report) {
    std::string out(kReportHeader);
    out += '\n';
    for (std::size_t i = 0; i < report.queries.size(); ++i) {
        const QueryRecord& q = report.queries[i];
        out += std::to_string(i) + "," + format_real(q.ha_latency * 1e6, 3) + "," +
               format_real(q.baseline_latency * 1e6, 3) + "," + format_real(q.speedup) + "," +
               std::to_string(q.hits[0]) + "," + std::to_string(q.hits[1]) + "," + std::to_string(q.hits[2]) +
               "," + std::to_string(q.hits[3]) + "\n";
    }
    return out;
}

inline std::string encode_summary_csv(const SimReport& report) {
    const SimSummary& s = report.summary;
    std::string out =
        "mean_ha_latency_us,mean_baseline_latency_us,mean_speedup,max_speedup,first_half_mean_speedup,"
        "second_half_mean_speedup,gpu_hits,pin_hits,page_hits,disk_loads,disk_page_bytes,page_pin_bytes,"
        "pin_gpu_bytes\n";
    out += format_real(s.mean_ha_latency * 1e6, 3) + "," + format_real(s.mean_baseline_latency * 1e6, 3) + "," +
           format_real(s.mean_speedup) + "," + format_real(s.max_speedup) + "," +
           format_real(s.first_half_mean_speedup) + "," + format_real(s.second_half_mean_speedup);
    for (auto h : report.hits) out += "," + std::to_string(h);
    for (auto b : report.link_bytes) out += "," + std::to_string(b);
    out += "\n";
    return out;
}

}  // namespace kvtier
