// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "kvtier/kvtier.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using kvtier::Bf16;
using kvtier::ChunkId;
using kvtier::Scheme;
using kvtier::Tier;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Shared {
    kvtier::RunConfig cfg;
    std::vector<kvtier::KvChunk> corpus;
    kvtier::ChunkStore store;
};

Shared& shared() {
    static Shared s;
    return s;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Per-scheme compression ratio on the default corpus.
Outcome compression_ratio() {
    Shared& s = shared();
    s.corpus = kvtier::gen_corpus(s.cfg.docs, s.cfg.tokens, s.cfg.width, s.cfg.seed);
    const auto ids = kvtier::sorted_ids(s.corpus);
    const auto prof = kvtier::profile_from_workload(kvtier::workload_for(ids, s.cfg));
    s.store = kvtier::build_store(s.corpus, prof, s.cfg);

    std::array<std::uint64_t, 4> raw{};
    std::array<std::uint64_t, 4> packed{};
    for (const auto& c : s.store.chunks) {
        raw[kvtier::scheme_index(c.scheme)] += c.bf16_bytes();
        packed[kvtier::scheme_index(c.scheme)] += c.compressed_bytes();
    }
    Outcome o{true, ""};
    for (Scheme sc : kvtier::kAllSchemes) {
        const auto i = kvtier::scheme_index(sc);
        const double r = packed[i] == 0 ? 0.0 : static_cast<double>(raw[i]) / static_cast<double>(packed[i]);
        o.pass = o.pass && r >= 1.99 && r <= 2.00;
        o.detail += std::string(kvtier::to_string(sc)) + "=" + fmt("%.5f", r) + " ";
    }
    return o;
}

// 2. FP8 decode then encode is the identity on every finite code.
Outcome fp8_identity() {
    Outcome o{true, ""};
    for (const auto* fmt_ : {&kvtier::kE4M3, &kvtier::kE5M2}) {
        int finite = 0;
        for (int c = 0; c < 256; ++c) {
            const auto code = static_cast<std::uint8_t>(c);
            if (!fmt_->is_finite_code(code)) continue;
            ++finite;
            const double x = kvtier::fp8_to_real(code, *fmt_);
            if (x != oracle::fp8_value(code, fmt_ == &kvtier::kE4M3 ? oracle::kE4M3 : oracle::kE5M2)) o.pass = false;
            const std::uint8_t back = kvtier::fp8_from_real(x, *fmt_);
            if (back != code) o.pass = false;
            if (kvtier::fp8_from_bf16(kvtier::fp8_to_bf16(code, *fmt_), *fmt_) != code) o.pass = false;
        }
        o.detail += std::to_string(finite) + " finite codes, ";
    }
    const double e4 = kvtier::kE4M3.max_finite();
    const double e5 = kvtier::kE5M2.max_finite();
    o.pass = o.pass && e4 == 448.0 && e5 == 57344.0;
    o.detail += "max " + fmt("%g", e4) + " / " + fmt("%g", e5);
    return o;
}

// 3. GSE-8 over all BF16 patterns with the default layout.
Outcome gse_sweep() {
    const kvtier::GseLayout layout;
    const int m = layout.m_bits;
    Outcome o{true, ""};
    std::size_t covered = 0;
    for (const auto& [lo, hi] : std::vector<std::pair<int, int>>{{-7, 10}, {-20, 6}, {-128, -100}, {100, 127}}) {
        const auto arr = kvtier::detail::gse_exponents_for_range(lo, hi, layout);
        std::vector<int> ints(arr.exponents.begin(), arr.exponents.end());
        for (std::uint32_t p = 0; p < 0x10000; ++p) {
            const Bf16 v = Bf16::from_bits(static_cast<std::uint16_t>(p));
            if (!v.is_finite()) continue;
            const double x = kvtier::bf16_to_real(v);
            const double got =
                kvtier::gse8_decode_value(kvtier::gse8_encode_value(v, arr.exponents, layout), arr.exponents, layout);
            if (x == 0.0) {
                if (got != 0.0) o.pass = false;
                continue;
            }
            const int e = oracle::exponent_of(x);
            if (e > ints.back() || e < ints.front() - (m - 1)) continue;
            ++covered;
            std::size_t g = 0;
            while (ints[g] < e) ++g;
            const int d = ints[g] - e;
            if (std::signbit(got) != std::signbit(x) || got == 0.0) o.pass = false;
            if (std::fabs(got) > std::fabs(x)) o.pass = false;
            if (std::fabs(x - got) / std::fabs(x) > std::ldexp(1.0, -(m - 1 - d))) o.pass = false;
        }
    }
    o.detail = std::to_string(covered) + " covered patterns over 4 arrays";
    return o;
}

// 4. RMSE ordering Int8 <= E4M3 <= E5M2 <= Gse8 on the default corpus.
Outcome error_ordering() {
    const Shared& s = shared();
    std::size_t ordered = 0;
    for (const auto& c : s.corpus) {
        const auto row = kvtier::analyze_chunk(c, s.cfg.layout);
        if (row.rmse[0] <= row.rmse[1] && row.rmse[1] <= row.rmse[2] && row.rmse[2] <= row.rmse[3]) ++ordered;
    }
    const double frac = static_cast<double>(ordered) / static_cast<double>(s.corpus.size());
    return {frac >= 0.95, fmt("%.4f of chunks ordered", frac) + " (" + std::to_string(s.corpus.size()) + " chunks)"};
}

oracle::Where to_ref(Tier t) { return static_cast<oracle::Where>(static_cast<int>(t)); }

// 5. Partition, tier lists and access outcomes against the reference
// interpreters, 1000 seeds.
Outcome algorithm_oracles() {
    std::size_t mismatches = 0;
    std::size_t accesses = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        kvtier::Rng rng(seed);
        const std::size_t n = 1 + rng.below(8);
        std::map<std::uint32_t, std::uint64_t> counts;
        kvtier::AccessProfile profile;
        for (std::size_t i = 0; i < n; ++i) {
            const auto id = static_cast<ChunkId>(rng.below(1000));
            const auto c = rng.below(6);
            if (profile.counts.emplace(id, c).second) counts[id] = c;
        }
        const auto ref_rank = oracle::rank(counts);
        const auto ranked = kvtier::sort_by_frequency(profile);
        if (ranked != ref_rank) ++mismatches;

        // Thresholds in whole percent keep the reference slicing exact.
        const int p1 = static_cast<int>(rng.below(41));
        const int p2 = static_cast<int>(rng.below(31));
        const int p3 = static_cast<int>(rng.below(31));
        const auto part = kvtier::partition(ranked, p1 / 100.0, p2 / 100.0, p3 / 100.0);
        const auto groups = oracle::slice_groups(ranked.size(), p1, p2, p3);
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (part.scheme_of(ref_rank[i]) != kvtier::kAllSchemes[static_cast<std::size_t>(groups[i])]) ++mismatches;
        }

        const auto lists = kvtier::build_lists(ranked, p1 / 100.0, p2 / 100.0, p3 / 100.0);
        std::map<std::uint32_t, oracle::Where> ref_list;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const auto where = static_cast<oracle::Where>(groups[i]);
            ref_list[ref_rank[i]] = where;
            if (to_ref(lists.list_of(ref_rank[i])) != where) ++mismatches;
        }

        const kvtier::TierCapacities caps{rng.below(4), rng.below(3), rng.below(3)};
        kvtier::PlacementState state(lists, caps);
        oracle::RefPlacement ref(ref_list, caps.gpu, caps.pin, caps.page);
        const std::size_t len = rng.below(33);
        for (std::size_t a = 0; a < len; ++a) {
            const ChunkId id = ref_rank[rng.below(ref_rank.size())];
            const auto got = state.access(id);
            const auto want = ref.access(id);
            ++accesses;
            bool same = to_ref(got.hit_tier) == want.hit && got.transfers.size() == want.links.size() &&
                        got.evictions.size() == want.evicted.size();
            for (std::size_t i = 0; same && i < want.links.size(); ++i) {
                same = static_cast<int>(got.transfers[i].link) == want.links[i];
            }
            for (std::size_t i = 0; same && i < want.evicted.size(); ++i) {
                same = to_ref(got.evictions[i].tier) == want.evicted[i].first &&
                       got.evictions[i].id == want.evicted[i].second;
            }
            if (!same) ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 seeds, " +
                                 std::to_string(accesses) + " accesses"};
}

std::map<kvtier::AblationMode, kvtier::SimReport>& reports() {
    static std::map<kvtier::AblationMode, kvtier::SimReport> r;
    return r;
}

// 6. Speedup trend on the default simulation.
Outcome speedup_trend() {
    const Shared& s = shared();
    for (auto mode : {kvtier::AblationMode::MpOnly, kvtier::AblationMode::DpNoPin, kvtier::AblationMode::DpPinOnly,
                      kvtier::AblationMode::DpOnly, kvtier::AblationMode::Full}) {
        kvtier::SimulationRequest req;
        req.mode = mode;
        reports()[mode] = kvtier::simulate_store(s.store, s.cfg, req);
    }
    const auto& full = reports()[kvtier::AblationMode::Full].summary;
    const auto& mp = reports()[kvtier::AblationMode::MpOnly].summary;
    const bool a = full.mean_speedup > 1.3;
    const bool b = full.second_half_mean_speedup >= full.first_half_mean_speedup;
    const bool c = full.mean_speedup >= mp.mean_speedup && mp.mean_speedup >= 1.0;
    return {a && b && c, "mean " + fmt("%.3f", full.mean_speedup) + ", halves " +
                             fmt("%.3f", full.first_half_mean_speedup) + " -> " +
                             fmt("%.3f", full.second_half_mean_speedup) + ", mp-only " + fmt("%.3f", mp.mean_speedup)};
}

// 7. Hit counts sum to queries x k in every report; queue sizes stay within
// capacity after every access of the default workload.
Outcome accounting() {
    const Shared& s = shared();
    const std::uint64_t expected = s.cfg.queries * s.cfg.k;
    bool ok = !reports().empty();
    for (const auto& [mode, r] : reports()) {
        ok = ok && r.total_hits() == expected && r.queries.size() == s.cfg.queries;
        for (const auto& q : r.queries) ok = ok && q.hits[0] + q.hits[1] + q.hits[2] + q.hits[3] == s.cfg.k;
    }

    const auto ids = kvtier::sorted_ids(s.store.chunks);
    const auto w = kvtier::workload_for(ids, s.cfg);
    const auto lists = kvtier::build_lists(kvtier::sort_by_frequency(kvtier::profile_from_workload(w)), s.cfg.tau_gpu,
                                           s.cfg.tau_pin, s.cfg.tau_page);
    std::size_t checks = 0;
    for (const kvtier::TierCapacities caps :
         {kvtier::TierCapacities{lists.gpu_list.size(), lists.pin_list.size(), lists.page_list.size()},
          kvtier::TierCapacities{3, 2, 1}, kvtier::TierCapacities{0, 0, 0}}) {
        kvtier::PlacementState state(lists, caps);
        for (const auto& q : w.queries) {
            for (ChunkId id : q) {
                state.access(id);
                ++checks;
                ok = ok && state.queue(Tier::Gpu).size() <= caps.gpu && state.queue(Tier::Pin).size() <= caps.pin &&
                     state.queue(Tier::Page).size() <= caps.page;
            }
        }
    }
    return {ok, std::to_string(reports().size()) + " reports, " + std::to_string(checks) + " capacity checks"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KVTIER_CLI_PATH) + " " + args + " >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return kvtier::read_file(p.string()); }

// 8. Two full CLI pipeline runs with the same seed produce identical bytes.
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "kvtier_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto pipeline = [&](const std::string& tag) {
        const auto p = [&](const char* name) { return (dir / (tag + name)).string(); };
        return run_cli("gen-corpus --out " + p("corpus.hkvc")) == 0 &&
               run_cli("profile --corpus " + p("corpus.hkvc") + " --out " + p("profile.csv")) == 0 &&
               run_cli("compress --corpus " + p("corpus.hkvc") + " --profile " + p("profile.csv") + " --out " +
                       p("store.harg")) == 0 &&
               run_cli("simulate --store " + p("store.harg") + " --profile " + p("profile.csv") + " --out " +
                       p("report.csv") + " --summary " + p("summary.csv")) == 0;
    };
    if (!pipeline("a_") || !pipeline("b_")) return {false, "a pipeline step failed"};
    bool same = true;
    std::string detail;
    for (const char* f : {"corpus.hkvc", "store.harg", "report.csv", "summary.csv"}) {
        const bool eq = slurp(dir / (std::string("a_") + f)) == slurp(dir / (std::string("b_") + f));
        same = same && eq;
        detail += std::string(f) + (eq ? " identical " : " DIFFERS ");
    }
    fs::remove_all(dir);
    return {same, detail};
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* name;
        double limit_s;  // 0 = no runtime bound
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {1, "compression ratio", 60, compression_ratio},
        {2, "fp8 exhaustive identity", 1, fp8_identity},
        {3, "gse8 exhaustive sweep", 5, gse_sweep},
        {4, "error ordering", 0, error_ordering},
        {5, "algorithm oracles", 30, algorithm_oracles},
        {6, "speedup trend", 120, speedup_trend},
        {7, "accounting invariants", 0, accounting},
        {8, "determinism", 0, determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s == 0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %d %-24s %s  %s [%.2fs%s]\n", c.number, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, in_time ? "" : " over limit");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
