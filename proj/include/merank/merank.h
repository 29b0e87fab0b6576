/*
 * merank — test-time re-ranking of scalar image-quality predictions.
 *
 * C API of the shared library. All functions returning merank_status
 * report failure details through merank_last_error(), a thread-local
 * message valid until the next failing call on the same thread.
 *
 * Handles are opaque; every *_new/_load has a matching *_free, and a
 * NULL handle is always safe to free.
 */

#ifndef MERANK_H
#define MERANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MERANK_API __declspec(dllexport)
#else
#define MERANK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum merank_status {
    MERANK_OK = 0,
    MERANK_ERR_INVALID_ARGUMENT = 1,
    MERANK_ERR_DATA = 2,
    MERANK_ERR_BACKEND = 3,
    MERANK_ERR_NUMERIC = 4,
    MERANK_ERR_IO = 5,
    MERANK_ERR_IMMUTABLE = 6
} merank_status;

/* Library version. Any pointer may be NULL. */
MERANK_API void merank_version(int* major, int* minor, int* patch);

/* Last error message on this thread; empty string when none. */
MERANK_API const char* merank_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct merank_config merank_config;

MERANK_API merank_config* merank_config_new(void);
MERANK_API void merank_config_free(merank_config* cfg);

/* Sets one key (same keys as the key=value config file: k, bins, lambda,
 * epsilon, capacity, fusion, seed, prob_clip, score_lo, score_hi,
 * compare_threads, sim_levels, sim_score_noise, sim_comparator_scale,
 * sim_comparator_noise, sim_embed_quality_weight, anchor_frac,
 * external_timeout_ms, external_retries). Unknown keys fail. */
MERANK_API merank_status merank_config_set(merank_config* cfg, const char* key,
                                           const char* value);

/* Loads a flat key=value file on top of the current values. */
MERANK_API merank_status merank_config_load_file(merank_config* cfg, const char* path);

/* Copies the effective value of one key into buf (NUL-terminated). */
MERANK_API merank_status merank_config_get(const merank_config* cfg, const char* key,
                                           char* buf, size_t buf_len);

/* ---- backends ---------------------------------------------------------- */

typedef struct merank_backend merank_backend;

/* Deterministic simulated oracle over a synthetic world. */
MERANK_API merank_status merank_backend_sim_new(const merank_config* cfg,
                                                merank_backend** out);

/* Loads synthetic items (id, q, content) from a dataset file into the
 * simulated backend's world. Redundant reloads are no-ops. */
MERANK_API merank_status merank_backend_sim_load_world(merank_backend* backend,
                                                       const char* dataset_path);

/* HTTP client for a remote quality service ("http://host:port"). */
MERANK_API merank_status merank_backend_external_new(const char* base_url,
                                                     const merank_config* cfg,
                                                     merank_backend** out);

MERANK_API void merank_backend_free(merank_backend* backend);

/* ---- file-level commands ------------------------------------------------
 * Every command writes "<primary output>.manifest.json" alongside its
 * output.                                                                  */

/* Synthetic world generation: n items split into anchor and query files. */
MERANK_API merank_status merank_synth(int n, const merank_config* cfg,
                                      const char* anchors_out, const char* queries_out);

/* Offline anchor-memory construction from a labeled dataset. */
MERANK_API merank_status merank_build_anchors(const char* dataset_path,
                                              merank_backend* backend,
                                              const merank_config* cfg,
                                              const char* bank_out);

/* Online streaming run against a saved anchor bank. cm_in / cm_out may be
 * NULL; when given they load/persist the contrast memory. */
MERANK_API merank_status merank_run(const char* stream_path, const char* bank_path,
                                    merank_backend* backend, const merank_config* cfg,
                                    const char* results_out, const char* cm_in,
                                    const char* cm_out);

/* Correlation / collapse report over one or more result files. */
MERANK_API merank_status merank_eval(const char* const* results_paths, size_t n_paths,
                                     const merank_config* cfg, const char* report_out);

/* Order-robustness sweep: `runs` seeded permutations of the stream. */
MERANK_API merank_status merank_permute_eval(const char* stream_path, const char* bank_path,
                                             merank_backend* backend,
                                             const merank_config* cfg, int runs,
                                             const char* report_out);

/* ---- scalar utilities ---------------------------------------------------
 * Exposed so bindings can verify the numerics without file round-trips.   */

/* Five-parameter logistic mapping, clamped to [lo, hi]. */
MERANK_API merank_status merank_logistic_map(double raw, const double beta[5], double lo,
                                             double hi, double* out);

MERANK_API double merank_normal_cdf(double x);
MERANK_API merank_status merank_normal_quantile(double p, double* out);

/* Thurstone Case V fusion over k (neighbor_score, preference) pairs. */
MERANK_API merank_status merank_fuse_exact(double initial, const double* neighbor_scores,
                                           const double* preferences, size_t k, double lambda,
                                           double lo, double hi, double* out);
MERANK_API merank_status merank_fuse_closed_form(double initial, const double* neighbor_scores,
                                                 const double* preferences, size_t k,
                                                 double lambda, double lo, double hi,
                                                 double* out);

MERANK_API merank_status merank_plcc(const double* x, const double* y, size_t n, double* out);
MERANK_API merank_status merank_srcc(const double* x, const double* y, size_t n, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MERANK_H */
