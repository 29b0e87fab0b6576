// merank command-line front end. Talks to the engine exclusively through
// the shared-library C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "merank/merank.h"

namespace {

struct ConfigDeleter {
    void operator()(merank_config* c) const { merank_config_free(c); }
};
struct BackendDeleter {
    void operator()(merank_backend* b) const { merank_backend_free(b); }
};
using ConfigPtr = std::unique_ptr<merank_config, ConfigDeleter>;
using BackendPtr = std::unique_ptr<merank_backend, BackendDeleter>;

// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.
int status_to_exit(merank_status st) {
    switch (st) {
        case MERANK_OK: return 0;
        case MERANK_ERR_INVALID_ARGUMENT: return 1;
        case MERANK_ERR_BACKEND: return 3;
        default: return 2;
    }
}

[[noreturn]] void die(merank_status st) {
    std::fprintf(stderr, "merank: error: %s\n", merank_last_error());
    std::exit(status_to_exit(st));
}

void check(merank_status st) {
    if (st != MERANK_OK) die(st);
}

// Flag values held as optional strings; only explicitly given flags
// override the config file.
struct CommonOpts {
    std::optional<std::string> k, bins, lambda, epsilon, capacity, fusion, seed,
        compare_threads;
    std::string backend = "sim";
    std::vector<std::string> world;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--k", o.k, "neighborhood budget K");
    cmd->add_option("--bins", o.bins, "anchor stratification bins B");
    cmd->add_option("--lambda", o.lambda, "Thurstone fusion prior weight");
    cmd->add_option("--epsilon", o.epsilon, "reflection gate");
    cmd->add_option("--capacity", o.capacity, "contrast memory capacity C");
    cmd->add_option("--fusion", o.fusion, "fusion mode: exact|closed");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--compare-threads", o.compare_threads, "comparison fan-out");
    cmd->add_option("--backend", o.backend, "sim or external:<url>");
    cmd->add_option("--world", o.world, "extra synthetic world file(s) for the sim backend");
}

ConfigPtr make_config(const CommonOpts& o) {
    ConfigPtr cfg(merank_config_new());
    if (const char* path = std::getenv("MERANK_CONFIG"); path && *path) {
        check(merank_config_load_file(cfg.get(), path));
    }
    if (const char* seed = std::getenv("MERANK_SEED"); seed && *seed) {
        check(merank_config_set(cfg.get(), "seed", seed));
    }
    auto apply = [&](const char* key, const std::optional<std::string>& v) {
        if (v) check(merank_config_set(cfg.get(), key, v->c_str()));
    };
    apply("k", o.k);
    apply("bins", o.bins);
    apply("lambda", o.lambda);
    apply("epsilon", o.epsilon);
    apply("capacity", o.capacity);
    apply("fusion", o.fusion);
    apply("seed", o.seed);
    apply("compare_threads", o.compare_threads);
    return cfg;
}

BackendPtr make_backend(const CommonOpts& o, const merank_config* cfg) {
    merank_backend* raw = nullptr;
    if (o.backend == "sim") {
        check(merank_backend_sim_new(cfg, &raw));
        BackendPtr backend(raw);
        for (const auto& path : o.world) {
            check(merank_backend_sim_load_world(backend.get(), path.c_str()));
        }
        return backend;
    }
    const std::string prefix = "external:";
    if (o.backend.rfind(prefix, 0) == 0) {
        check(merank_backend_external_new(o.backend.substr(prefix.size()).c_str(), cfg, &raw));
        return BackendPtr(raw);
    }
    std::fprintf(stderr, "merank: error: unknown backend '%s' (use sim or external:<url>)\n",
                 o.backend.c_str());
    std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memory-enhanced re-ranking for image-quality scores"};
    app.require_subcommand(1);

    int version_major = 0, version_minor = 0, version_patch = 0;
    merank_version(&version_major, &version_minor, &version_patch);
    char version[32];
    std::snprintf(version, sizeof(version), "%d.%d.%d", version_major, version_minor,
                  version_patch);
    app.set_version_flag("--version", version);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic world");
    int synth_n = 1000;
    std::string synth_out = ".";
    std::optional<std::string> synth_seed, synth_frac;
    synth->add_option("--n", synth_n, "number of items")->required();
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "base RNG seed");
    synth->add_option("--anchor-frac", synth_frac, "fraction routed to the anchor file");

    // build-anchors
    auto* build = app.add_subcommand("build-anchors", "build the anchor memory bank");
    CommonOpts build_opts;
    std::string build_dataset, build_out;
    build->add_option("--dataset", build_dataset, "labeled dataset (JSONL)")->required();
    build->add_option("--out", build_out, "bank output path")->required();
    add_common_flags(build, build_opts);

    // run
    auto* run = app.add_subcommand("run", "process a query stream online");
    CommonOpts run_opts;
    std::string run_stream, run_am, run_out;
    std::optional<std::string> run_cm_in, run_cm_out;
    run->add_option("--stream", run_stream, "query stream (JSONL)")->required();
    run->add_option("--am", run_am, "anchor bank file")->required();
    run->add_option("--out", run_out, "results output path")->required();
    run->add_option("--cm-in", run_cm_in, "contrast memory to preload");
    run->add_option("--cm-out", run_cm_out, "persist contrast memory here");
    add_common_flags(run, run_opts);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate result files");
    std::vector<std::string> eval_results;
    std::string eval_report;
    eval->add_option("--results", eval_results, "results file(s)")->required();
    eval->add_option("--report", eval_report, "report output path")->required();

    // permute-eval
    auto* permute = app.add_subcommand("permute-eval", "order-robustness sweep");
    CommonOpts permute_opts;
    std::string permute_stream, permute_am, permute_report;
    int permute_runs = 5;
    permute->add_option("--stream", permute_stream, "query stream (JSONL)")->required();
    permute->add_option("--am", permute_am, "anchor bank file")->required();
    permute->add_option("--report", permute_report, "report output path")->required();
    permute->add_option("--runs", permute_runs, "number of permutations");
    add_common_flags(permute, permute_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's assorted parse-error codes onto exit code 1;
        // --help and --version stay 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (synth->parsed()) {
        CommonOpts opts;
        opts.seed = synth_seed;
        ConfigPtr cfg = make_config(opts);
        if (synth_frac) check(merank_config_set(cfg.get(), "anchor_frac", synth_frac->c_str()));
        const std::string anchors = synth_out + "/anchors.jsonl";
        const std::string queries = synth_out + "/queries.jsonl";
        check(merank_synth(synth_n, cfg.get(), anchors.c_str(), queries.c_str()));
        std::printf("wrote %s and %s\n", anchors.c_str(), queries.c_str());
    } else if (build->parsed()) {
        ConfigPtr cfg = make_config(build_opts);
        BackendPtr backend = make_backend(build_opts, cfg.get());
        check(merank_build_anchors(build_dataset.c_str(), backend.get(), cfg.get(),
                                   build_out.c_str()));
        std::printf("wrote %s\n", build_out.c_str());
    } else if (run->parsed()) {
        ConfigPtr cfg = make_config(run_opts);
        BackendPtr backend = make_backend(run_opts, cfg.get());
        check(merank_run(run_stream.c_str(), run_am.c_str(), backend.get(), cfg.get(),
                         run_out.c_str(), run_cm_in ? run_cm_in->c_str() : nullptr,
                         run_cm_out ? run_cm_out->c_str() : nullptr));
        std::printf("wrote %s\n", run_out.c_str());
    } else if (eval->parsed()) {
        CommonOpts opts;
        ConfigPtr cfg = make_config(opts);
        std::vector<const char*> paths;
        paths.reserve(eval_results.size());
        for (const auto& p : eval_results) paths.push_back(p.c_str());
        check(merank_eval(paths.data(), paths.size(), cfg.get(), eval_report.c_str()));
        std::printf("wrote %s\n", eval_report.c_str());
    } else if (permute->parsed()) {
        ConfigPtr cfg = make_config(permute_opts);
        BackendPtr backend = make_backend(permute_opts, cfg.get());
        check(merank_permute_eval(permute_stream.c_str(), permute_am.c_str(), backend.get(),
                                  cfg.get(), permute_runs, permute_report.c_str()));
        std::printf("wrote %s\n", permute_report.c_str());
    }
    return 0;
}
