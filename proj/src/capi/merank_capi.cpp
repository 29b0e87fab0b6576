#include "merank/merank.h"

#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/engine_config.hpp"
#include "core/external_backend.hpp"
#include "core/fusion.hpp"
#include "core/metrics.hpp"
#include "core/ops.hpp"
#include "core/probit.hpp"
#include "core/scale_map.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string tl_error;

void set_error(const std::string& msg) { tl_error = msg; }

merank_status code_to_status(merank::ErrorCode code) {
    switch (code) {
        case merank::ErrorCode::InvalidArgument: return MERANK_ERR_INVALID_ARGUMENT;
        case merank::ErrorCode::Data: return MERANK_ERR_DATA;
        case merank::ErrorCode::Backend: return MERANK_ERR_BACKEND;
        case merank::ErrorCode::Numeric: return MERANK_ERR_NUMERIC;
        case merank::ErrorCode::Io: return MERANK_ERR_IO;
        case merank::ErrorCode::Immutable: return MERANK_ERR_IMMUTABLE;
    }
    return MERANK_ERR_DATA;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message. The C boundary never lets an exception escape.
template <typename Fn>
merank_status guarded(Fn&& fn) {
    try {
        fn();
        tl_error.clear();
        return MERANK_OK;
    } catch (const merank::Error& ex) {
        set_error(ex.what());
        return code_to_status(ex.code());
    } catch (const std::exception& ex) {
        set_error(ex.what());
        return MERANK_ERR_DATA;
    } catch (...) {
        set_error("unknown error");
        return MERANK_ERR_DATA;
    }
}

merank_status require(bool cond, const char* msg) {
    if (cond) return MERANK_OK;
    set_error(msg);
    return MERANK_ERR_INVALID_ARGUMENT;
}

merank_status fuse_common(bool exact, double initial, const double* scores, const double* prefs,
                          size_t k, double lambda, double lo, double hi, double* out) {
    if (auto st = require(out && (k == 0 || (scores && prefs)), "null argument");
        st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        std::vector<merank::PreferenceEvidence> evidence(k);
        for (size_t i = 0; i < k; ++i) evidence[i] = {scores[i], prefs[i]};
        merank::FusionConfig cfg;
        cfg.lambda = lambda;
        cfg.range = {lo, hi};
        *out = exact ? merank::fuse_exact(initial, evidence, cfg)
                     : merank::fuse_closed_form(initial, evidence, cfg);
    });
}

}  // namespace

struct merank_config {
    merank::EngineConfig engine;
};

struct merank_backend {
    std::unique_ptr<merank::QualityBackend> impl;
    merank::SimulatedBackend* sim = nullptr;  // non-null when impl is simulated
};

extern "C" {

void merank_version(int* major, int* minor, int* patch) {
    if (major) *major = MERANK_VERSION_MAJOR;
    if (minor) *minor = MERANK_VERSION_MINOR;
    if (patch) *patch = MERANK_VERSION_PATCH;
}

const char* merank_last_error(void) { return tl_error.c_str(); }

merank_config* merank_config_new(void) { return new merank_config(); }

void merank_config_free(merank_config* cfg) { delete cfg; }

merank_status merank_config_set(merank_config* cfg, const char* key, const char* value) {
    if (auto st = require(cfg && key && value, "null argument"); st != MERANK_OK) return st;
    return guarded([&] { cfg->engine.set(key, value); });
}

merank_status merank_config_load_file(merank_config* cfg, const char* path) {
    if (auto st = require(cfg && path, "null argument"); st != MERANK_OK) return st;
    return guarded([&] { cfg->engine.apply(merank::read_config_file(path)); });
}

merank_status merank_config_get(const merank_config* cfg, const char* key, char* buf,
                                size_t buf_len) {
    if (auto st = require(cfg && key && buf && buf_len > 0, "null argument"); st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        const auto snapshot = cfg->engine.snapshot();
        const auto it = snapshot.find(key);
        if (it == snapshot.end()) {
            merank::fail(merank::ErrorCode::InvalidArgument,
                         std::string("unknown config key '") + key + "'");
        }
        std::strncpy(buf, it->second.c_str(), buf_len - 1);
        buf[buf_len - 1] = '\0';
    });
}

merank_status merank_backend_sim_new(const merank_config* cfg, merank_backend** out) {
    if (auto st = require(cfg && out, "null argument"); st != MERANK_OK) return st;
    return guarded([&] {
        merank::SimBackendConfig sim = cfg->engine.sim;
        sim.range = cfg->engine.pipeline.range;
        auto backend = std::make_unique<merank_backend>();
        auto impl = std::make_unique<merank::SimulatedBackend>(sim);
        backend->sim = impl.get();
        backend->impl = std::move(impl);
        *out = backend.release();
    });
}

merank_status merank_backend_sim_load_world(merank_backend* backend, const char* dataset_path) {
    if (auto st = require(backend && dataset_path, "null argument"); st != MERANK_OK) return st;
    if (auto st = require(backend->sim != nullptr, "backend is not simulated"); st != MERANK_OK) {
        return st;
    }
    return guarded([&] { merank::sim_load_world(*backend->sim, {dataset_path}); });
}

merank_status merank_backend_external_new(const char* base_url, const merank_config* cfg,
                                          merank_backend** out) {
    if (auto st = require(base_url && cfg && out, "null argument"); st != MERANK_OK) return st;
    return guarded([&] {
        auto backend = std::make_unique<merank_backend>();
        backend->impl = std::make_unique<merank::ExternalBackend>(
            base_url, cfg->engine.external_timeout_ms, cfg->engine.external_retries,
            cfg->engine.pipeline.fusion.prob_clip);
        *out = backend.release();
    });
}

void merank_backend_free(merank_backend* backend) { delete backend; }

merank_status merank_synth(int n, const merank_config* cfg, const char* anchors_out,
                           const char* queries_out) {
    if (auto st = require(cfg && anchors_out && queries_out, "null argument"); st != MERANK_OK) {
        return st;
    }
    return guarded([&] { merank::op_synth(n, cfg->engine, {anchors_out, queries_out}); });
}

merank_status merank_build_anchors(const char* dataset_path, merank_backend* backend,
                                   const merank_config* cfg, const char* bank_out) {
    if (auto st = require(dataset_path && backend && cfg && bank_out, "null argument");
        st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        if (backend->sim) merank::sim_load_world(*backend->sim, {dataset_path});
        merank::op_build_anchors(dataset_path, *backend->impl, cfg->engine, bank_out);
    });
}

merank_status merank_run(const char* stream_path, const char* bank_path,
                         merank_backend* backend, const merank_config* cfg,
                         const char* results_out, const char* cm_in, const char* cm_out) {
    if (auto st = require(stream_path && bank_path && backend && cfg && results_out,
                          "null argument");
        st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        if (backend->sim) merank::sim_load_world(*backend->sim, {stream_path});
        merank::op_run(stream_path, bank_path, *backend->impl, cfg->engine, results_out,
                       cm_in ? std::optional<std::string>(cm_in) : std::nullopt,
                       cm_out ? std::optional<std::string>(cm_out) : std::nullopt);
    });
}

merank_status merank_eval(const char* const* results_paths, size_t n_paths,
                          const merank_config* cfg, const char* report_out) {
    if (auto st = require(results_paths && n_paths > 0 && cfg && report_out, "null argument");
        st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        std::vector<std::string> paths(results_paths, results_paths + n_paths);
        merank::op_eval(paths, cfg->engine, report_out);
    });
}

merank_status merank_permute_eval(const char* stream_path, const char* bank_path,
                                  merank_backend* backend, const merank_config* cfg, int runs,
                                  const char* report_out) {
    if (auto st = require(stream_path && bank_path && backend && cfg && report_out,
                          "null argument");
        st != MERANK_OK) {
        return st;
    }
    return guarded([&] {
        if (backend->sim) merank::sim_load_world(*backend->sim, {stream_path});
        merank::op_permute_eval(stream_path, bank_path, *backend->impl, cfg->engine, runs,
                                report_out);
    });
}

merank_status merank_logistic_map(double raw, const double beta[5], double lo, double hi,
                                  double* out) {
    if (auto st = require(beta && out, "null argument"); st != MERANK_OK) return st;
    return guarded([&] {
        merank::LogisticParams p;
        p.beta1 = beta[0];
        p.beta2 = beta[1];
        p.beta3 = beta[2];
        p.beta4 = beta[3];
        p.beta5 = beta[4];
        p.raw_lo = lo;
        p.raw_hi = hi;
        *out = merank::logistic_map(raw, p, {lo, hi});
    });
}

double merank_normal_cdf(double x) { return merank::normal_cdf(x); }

merank_status merank_normal_quantile(double p, double* out) {
    if (auto st = require(out != nullptr, "null argument"); st != MERANK_OK) return st;
    return guarded([&] { *out = merank::normal_quantile(p); });
}

merank_status merank_fuse_exact(double initial, const double* neighbor_scores,
                                const double* preferences, size_t k, double lambda, double lo,
                                double hi, double* out) {
    return fuse_common(true, initial, neighbor_scores, preferences, k, lambda, lo, hi, out);
}

merank_status merank_fuse_closed_form(double initial, const double* neighbor_scores,
                                      const double* preferences, size_t k, double lambda,
                                      double lo, double hi, double* out) {
    return fuse_common(false, initial, neighbor_scores, preferences, k, lambda, lo, hi, out);
}

merank_status merank_plcc(const double* x, const double* y, size_t n, double* out) {
    if (auto st = require(x && y && out, "null argument"); st != MERANK_OK) return st;
    return guarded([&] { *out = merank::plcc({x, n}, {y, n}); });
}

merank_status merank_srcc(const double* x, const double* y, size_t n, double* out) {
    if (auto st = require(x && y && out, "null argument"); st != MERANK_OK) return st;
    return guarded([&] { *out = merank::srcc({x, n}, {y, n}); });
}

}  // extern "C"
