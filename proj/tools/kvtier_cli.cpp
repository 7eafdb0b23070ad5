// kvtier command-line driver: corpus generation, analysis, profiling,
// hotness-aware compression and tiered-placement simulation.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kvtier/kvtier.hpp"

namespace {

using kvtier::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config keys exposed as flags on a subcommand, collected as raw text so the
// same parser handles config files and flags.
class ConfigFlags {
public:
    void add_config(CLI::App& app, std::string& path) {
        app.add_option("--config", path, "flat key=value config file")->check(CLI::ExistingFile);
    }

    void add(CLI::App& app, std::initializer_list<const char*> keys) {
        for (const char* key : keys) {
            std::string flag = std::string("--") + key;
            for (auto& ch : flag) {
                if (ch == '_') ch = '-';
            }
            if (std::string_view(key) == "zipf_s") flag += ",--zipf";
            app.add_option(flag, values_[key], "override config key " + std::string(key));
        }
    }

    // Defaults, then the config file, then flags.
    RunConfig resolve(const std::string& config_path) const {
        RunConfig cfg;
        try {
            if (!config_path.empty()) kvtier::apply_config_text(cfg, kvtier::read_file(config_path));
            for (const auto& [key, value] : values_) {
                if (!value.empty()) cfg.set(key, value);
            }
            cfg.validate();
        } catch (const kvtier::InvalidArgument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }

private:
    std::map<std::string, std::string> values_;
};

constexpr std::initializer_list<const char*> kCorpusKeys = {"docs", "tokens", "width", "seed"};
constexpr std::initializer_list<const char*> kWorkloadKeys = {"queries", "k", "zipf_s", "seed"};
constexpr std::initializer_list<const char*> kLayoutKeys = {"gse_e_bits", "gse_m_bits"};
constexpr std::initializer_list<const char*> kCompressKeys = {"tau1", "tau2", "tau3"};
constexpr std::initializer_list<const char*> kPlacementKeys = {"tau_gpu", "tau_pin", "tau_page"};
constexpr std::initializer_list<const char*> kCostKeys = {
    "bw_disk_page", "bw_page_pin", "bw_pin_gpu",  "lat_disk_page", "lat_page_pin", "lat_pin_gpu",
    "decode_int8",  "decode_e4m3", "decode_e5m2", "decode_gse8",   "gpu_access_time"};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        kvtier::write_file(path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kvtier: hotness-aware mixed-precision KV chunk compression and tiered placement"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;

    // gen-corpus
    ConfigFlags gen_flags;
    auto* gen = app.add_subcommand("gen-corpus", "write a synthetic HKVC corpus");
    gen_flags.add_config(*gen, config_path);
    gen_flags.add(*gen, kCorpusKeys);
    gen->add_option("--out", out_path, "output corpus path")->required();

    // analyze
    ConfigFlags analyze_flags;
    std::string corpus_path;
    auto* analyze = app.add_subcommand("analyze", "per-chunk range, exponent coverage and codec RMSE as CSV");
    analyze->add_option("corpus", corpus_path, "HKVC corpus")->required();
    analyze->add_option("--out", out_path, "CSV path (stdout if omitted)");
    analyze_flags.add_config(*analyze, config_path);
    analyze_flags.add(*analyze, kLayoutKeys);
    analyze_flags.add(*analyze, {"seed"});

    // profile
    ConfigFlags profile_flags;
    std::optional<std::uint32_t> chunk_count;
    bool uniform = false;
    auto* profile = app.add_subcommand("profile", "access-count profile from a generated workload");
    profile_flags.add_config(*profile, config_path);
    profile_flags.add(*profile, kWorkloadKeys);
    auto* corpus_opt = profile->add_option("--corpus", corpus_path, "take chunk ids from this corpus");
    auto* chunks_opt = profile->add_option("--chunks", chunk_count, "chunk ids 0..N-1")->check(CLI::PositiveNumber);
    corpus_opt->excludes(chunks_opt);
    profile->add_flag("--uniform", uniform, "uniform sampling (Zipf exponent 0)");
    profile->add_option("--out", out_path, "CSV path (stdout if omitted)");

    // compress
    ConfigFlags compress_flags;
    std::string profile_path;
    auto* compress = app.add_subcommand("compress", "hotness-aware compression into a HARG store");
    compress->add_option("--corpus", corpus_path, "HKVC corpus")->required();
    compress->add_option("--profile", profile_path, "chunk_id,count CSV")->required();
    compress->add_option("--out", out_path, "output store path")->required();
    compress_flags.add_config(*compress, config_path);
    compress_flags.add(*compress, kCompressKeys);
    compress_flags.add(*compress, kLayoutKeys);
    compress_flags.add(*compress, {"seed"});

    // simulate
    ConfigFlags sim_flags;
    std::string store_path;
    std::string summary_path;
    std::string mode_name = "full";
    bool baseline_only = false;
    auto* simulate = app.add_subcommand("simulate", "replay a workload through tiered placement");
    simulate->add_option("--store", store_path, "HARG store")->required();
    simulate->add_option("--out", out_path, "per-query report CSV (stdout if omitted)");
    simulate->add_option("--summary", summary_path, "summary CSV path (stdout if omitted)");
    simulate->add_option("--profile", profile_path, "hotness profile (default: counts of the replayed workload)");
    simulate->add_option("--mode", mode_name, "full | mp-only | dp-no-pin | dp-pin-only | dp-only");
    simulate->add_flag("--baseline-only", baseline_only, "uncompressed, uncached pipeline");
    sim_flags.add_config(*simulate, config_path);
    sim_flags.add(*simulate, kWorkloadKeys);
    sim_flags.add(*simulate, kPlacementKeys);
    sim_flags.add(*simulate, kCostKeys);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            const RunConfig cfg = gen_flags.resolve(config_path);
            const auto corpus = kvtier::gen_corpus(cfg.docs, cfg.tokens, cfg.width, cfg.seed);
            const std::string bytes = kvtier::encode_corpus(corpus);
            kvtier::write_file(out_path, bytes);
            std::cout << "chunks: " << corpus.size() << "\nbytes: " << bytes.size() << "\n";
        } else if (*analyze) {
            const RunConfig cfg = analyze_flags.resolve(config_path);
            const auto corpus = kvtier::decode_corpus(kvtier::read_file(corpus_path));
            std::vector<kvtier::AnalysisRow> rows;
            rows.reserve(corpus.size());
            for (const auto& c : corpus) rows.push_back(kvtier::analyze_chunk(c, cfg.layout));
            emit(out_path, kvtier::encode_analysis_csv(rows));
        } else if (*profile) {
            RunConfig cfg = profile_flags.resolve(config_path);
            if (uniform) cfg.zipf_s = 0.0;
            std::vector<kvtier::ChunkId> ids;
            if (!corpus_path.empty()) {
                ids = kvtier::sorted_ids(kvtier::decode_corpus(kvtier::read_file(corpus_path)));
            } else if (chunk_count) {
                ids.resize(*chunk_count);
                for (std::uint32_t i = 0; i < *chunk_count; ++i) ids[i] = i;
            } else {
                throw UsageError("profile: one of --corpus or --chunks is required");
            }
            if (cfg.k > ids.size()) throw UsageError("profile: k exceeds the number of chunks");
            const auto w = kvtier::workload_for(ids, cfg);
            emit(out_path, kvtier::encode_profile_csv(kvtier::profile_from_workload(w)));
        } else if (*compress) {
            const RunConfig cfg = compress_flags.resolve(config_path);
            const auto corpus = kvtier::decode_corpus(kvtier::read_file(corpus_path));
            const auto prof = kvtier::decode_profile_csv(kvtier::read_file(profile_path));
            const auto store = kvtier::build_store(corpus, prof, cfg);
            kvtier::write_file(out_path, kvtier::encode_store(store));

            std::array<std::size_t, 4> per_scheme{};
            for (const auto& c : store.chunks) ++per_scheme[kvtier::scheme_index(c.scheme)];
            std::cout << "chunks: " << store.chunks.size() << "\n";
            for (auto s : kvtier::kAllSchemes) {
                std::cout << kvtier::to_string(s) << ": " << per_scheme[kvtier::scheme_index(s)] << "\n";
            }
            std::cout << "compression ratio: " << kvtier::format_real(kvtier::store_compression_ratio(store))
                      << "\n";
        } else if (*simulate) {
            const RunConfig cfg = sim_flags.resolve(config_path);
            const auto mode = kvtier::parse_ablation_mode(mode_name);
            if (!mode) throw UsageError("unknown --mode '" + mode_name + "'");
            const auto store = kvtier::decode_store(kvtier::read_file(store_path));
            if (cfg.k > store.chunks.size()) throw UsageError("simulate: k exceeds the number of chunks");

            kvtier::SimulationRequest req;
            req.mode = *mode;
            req.baseline_only = baseline_only;
            if (!profile_path.empty()) req.profile = kvtier::decode_profile_csv(kvtier::read_file(profile_path));

            const auto report = kvtier::simulate_store(store, cfg, req);
            emit(out_path, kvtier::encode_report_csv(report));
            emit(summary_path, kvtier::encode_summary_csv(report));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
