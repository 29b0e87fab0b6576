// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exits with the number of failed criteria. Tolerances and thresholds are
// pinned in code, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/formats.hpp"
#include "core/fusion.hpp"
#include "core/memory_bank.hpp"
#include "core/metrics.hpp"
#include "core/ops.hpp"
#include "core/pipeline.hpp"
#include "core/probit.hpp"
#include "core/retrieval.hpp"
#include "core/rng.hpp"
#include "core/scale_map.hpp"
#include "core/sim_backend.hpp"
#include "oracles.hpp"

using namespace merank;

namespace {

struct Harness {
    int failures = 0;
    int index = 0;

    void report(const std::string& name, bool pass, const std::string& detail) {
        ++index;
        std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        try {
            const auto [ok, detail] = fn();
            report(name, ok, detail);
        } catch (const std::exception& ex) {
            report(name, false, std::string("exception: ") + ex.what());
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

std::filesystem::path work_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "merank_acceptance";
    std::filesystem::create_directories(dir);
    return dir;
}

// ---- criterion 1: closed-form identity ------------------------------------

std::pair<bool, std::string> closed_form_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = derive_rng(1001, "acc-closed-form");
    const double lambdas[] = {0.0, 1e-3, 1e-2, 1e-1};
    FusionConfig cfg;
    cfg.range = {-100.0, 100.0};  // wide: the identity is checked pre-clamp

    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t k = 1 + rng.next_below(64);
        std::vector<PreferenceEvidence> ev(k);
        std::vector<long double> mu(k);
        for (std::size_t j = 0; j < k; ++j) {
            ev[j].neighbor_score = 1.0 + 4.0 * rng.next_unit();
            ev[j].preference = 1e-6 + (1.0 - 2e-6) * rng.next_unit();
            mu[j] = static_cast<long double>(ev[j].neighbor_score) +
                    normal_quantile(ev[j].preference);
        }
        const double lambda = lambdas[t % 4];
        const double s0 = 1.0 + 4.0 * rng.next_unit();
        cfg.lambda = lambda;
        if (k == 0 && lambda == 0.0) continue;
        const double got = fuse_closed_form(s0, ev, cfg);

        // Analytic ridge minimizer, located independently as the root of
        // the (linear, increasing) ridge derivative by bisection in long
        // double.
        auto deriv = [&](long double s) {
            long double acc = 0.0L;
            for (long double m : mu) acc += s - m;
            acc += static_cast<long double>(lambda) * (s - s0);
            return acc;
        };
        long double lo = -200.0L, hi = 200.0L;
        for (int i = 0; i < 220; ++i) {
            const long double mid = 0.5L * (lo + hi);
            (deriv(mid) < 0.0L ? lo : hi) = mid;
        }
        worst = std::max(worst, std::abs(got - static_cast<double>(0.5L * (lo + hi))));
    }
    const double elapsed = seconds_since(t0);
    const bool ok = worst <= 1e-12 && elapsed < 5.0;
    return {ok, fmt("max |closed - ridge argmin| = %.3e (tol 1e-12), %.2fs (budget 5s)", worst,
                    elapsed)};
}

// ---- criterion 2: exact-solver optimality ----------------------------------

std::pair<bool, std::string> exact_solver_optimality() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = derive_rng(1002, "acc-exact");
    FusionConfig cfg;  // default [1,5] range
    cfg.lambda = 0.0;

    double worst_dist = 0.0, worst_grad = 0.0;
    const double grid_lo = 0.0 - 1.0, grid_hi = 6.0 + 1.0;  // [lo-2, hi+2] of [1,5]
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 1 + rng.next_below(8);
        std::vector<PreferenceEvidence> ev(k);
        for (auto& e : ev) {
            e.neighbor_score = 1.0 + 4.0 * rng.next_unit();
            e.preference = 1e-6 + (1.0 - 2e-6) * rng.next_unit();
        }
        const double s0 = 1.0 + 4.0 * rng.next_unit();
        cfg.lambda = (t % 4) * 1e-2;
        const double got = fuse_exact(s0, ev, cfg);

        auto f = [&](double s) { return objective(s, s0, ev, cfg.lambda); };
        // Two-stage scan at the resolution of a single 10^6-point grid over
        // [-1,7]; equivalent for a convex objective (the dense argmin lies
        // within one coarse cell of the coarse argmin). Validated against a
        // literal one-stage scan below.
        double ref = oracles::two_stage_grid_argmin(f, grid_lo, grid_hi, 1001, 2001);
        ref = cfg.range.clamp(ref);
        worst_dist = std::max(worst_dist, std::abs(got - ref));
        if (got > cfg.range.lo + 1e-9 && got < cfg.range.hi - 1e-9) {
            worst_grad = std::max(worst_grad, std::abs(gradient(got, s0, ev, cfg.lambda)));
        }
        if (t < 10) {
            const double dense = cfg.range.clamp(oracles::grid_argmin(f, grid_lo, grid_hi, 1000001));
            if (std::abs(dense - ref) > 2e-5) {
                return {false, fmt("two-stage scan deviates from the dense scan: %.3e",
                                   std::abs(dense - ref))};
            }
        }
    }

    // Gradient vs central finite differences at 1,000 random points.
    double worst_fd = 0.0;
    const double h = 1e-6;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 1 + rng.next_below(8);
        std::vector<PreferenceEvidence> ev(k);
        for (auto& e : ev) {
            e.neighbor_score = 1.0 + 4.0 * rng.next_unit();
            e.preference = 1e-6 + (1.0 - 2e-6) * rng.next_unit();
        }
        const double s0 = 1.0 + 4.0 * rng.next_unit();
        const double lambda = rng.next_unit() * 0.1;
        const double s = 0.5 + 5.0 * rng.next_unit();
        const double fd =
            (objective(s + h, s0, ev, lambda) - objective(s - h, s0, ev, lambda)) / (2.0 * h);
        const double g = gradient(s, s0, ev, lambda);
        worst_fd = std::max(worst_fd, std::abs(g - fd) / std::max({1.0, std::abs(g), std::abs(fd)}));
    }

    const double elapsed = seconds_since(t0);
    const bool ok = worst_dist <= 1e-4 && worst_grad <= 1e-10 && worst_fd <= 1e-5 &&
                    elapsed < 60.0;
    return {ok, fmt("max |exact - grid argmin| = %.3e (tol 1e-4), max |grad| = %.3e (tol 1e-10), "
                    "max fd rel err = %.3e (tol 1e-5), %.1fs (budget 60s)",
                    worst_dist, worst_grad, worst_fd, elapsed)};
}

// ---- criterion 3: probit utilities -----------------------------------------

std::pair<bool, std::string> probit_utilities() {
    double worst_cdf = 0.0;
    for (int i = 0; i <= 1600; ++i) {
        const double x = -8.0 + 0.01 * i;
        worst_cdf = std::max(
            worst_cdf, std::abs(normal_cdf(x) - static_cast<double>(oracles::normal_cdf(x))));
    }
    double worst_rt = 0.0;
    for (int i = 0; i <= 800; ++i) {
        const double x = -4.0 + 0.01 * i;
        worst_rt = std::max(worst_rt, std::abs(normal_quantile(normal_cdf(x)) - x));
    }
    const bool ok = worst_cdf <= 1e-12 && worst_rt <= 1e-9;
    return {ok, fmt("max |cdf - oracle| = %.3e (tol 1e-12), max roundtrip = %.3e (tol 1e-9)",
                    worst_cdf, worst_rt)};
}

// ---- criterion 4: logistic calibration --------------------------------------

std::pair<bool, std::string> logistic_calibration() {
    // Curved generator; its image spans ~[0.09, 5.11], so the calibration
    // range is configured to contain it.
    const ScoreRange range{0.0, 6.0};
    LogisticParams truth;
    truth.beta1 = 2.0;
    truth.beta2 = 1.5;
    truth.beta3 = 3.0;
    truth.beta4 = 0.8;
    truth.beta5 = 0.2;
    truth.raw_lo = 1.0;
    truth.raw_hi = 5.0;

    Rng rng = derive_rng(1004, "acc-calibration");
    std::vector<std::pair<double, double>> train;
    for (int i = 0; i < 500; ++i) {
        const double x = 1.0 + 4.0 * rng.next_unit();
        train.emplace_back(x, logistic_map(x, truth, range) + 0.05 * rng.next_gaussian());
    }
    const LogisticParams fitted = fit_logistic(train, range);
    double held_sse = 0.0;
    const int n_held = 500;
    for (int i = 0; i < n_held; ++i) {
        const double x = 1.0 + 4.0 * rng.next_unit();
        const double d = logistic_map(x, fitted, range) - logistic_map(x, truth, range);
        held_sse += d * d;
    }
    const double held_rmse = std::sqrt(held_sse / n_held);

    // Identity data.
    std::vector<std::pair<double, double>> ident;
    for (int i = 0; i < 500; ++i) {
        const double x = 1.0 + 4.0 * i / 499.0;
        ident.emplace_back(x, x);
    }
    const LogisticParams id_fit = fit_logistic(ident, {});
    double id_sse = 0.0;
    for (int i = 0; i < 101; ++i) {
        const double x = 1.0 + 4.0 * (i + 0.31) / 101.0;
        const double d = logistic_map(x, id_fit, {}) - x;
        id_sse += d * d;
    }
    const double id_rmse = std::sqrt(id_sse / 101);

    // Monotone grid check must hold for every fit, including adversarial
    // non-monotone targets that trip the linear fallback.
    bool all_monotone = monotone_on_grid(fitted, range) && monotone_on_grid(id_fit, {});
    for (int t = 0; t < 10 && all_monotone; ++t) {
        std::vector<std::pair<double, double>> data;
        for (int i = 0; i < 60; ++i) {
            const double x = 1.0 + 4.0 * rng.next_unit();
            const double y = ScoreRange{}.clamp(3.0 + 1.5 * std::sin((1.0 + t) * x) +
                                                0.3 * rng.next_gaussian());
            data.emplace_back(x, y);
        }
        all_monotone = monotone_on_grid(fit_logistic(data, {}), {});
    }

    const bool ok = held_rmse <= 0.1 && id_rmse < 1e-6 && all_monotone;
    return {ok, fmt("held-out RMSE = %.4f (tol 0.1), identity RMSE = %.2e (tol 1e-6), "
                    "monotone grid check: %s",
                    held_rmse, id_rmse, all_monotone ? "always passed" : "VIOLATED")};
}

// ---- criterion 5: retrieval exactness ----------------------------------------

Embedding random_unit_vec(Rng& rng, std::size_t dim) {
    Embedding e;
    e.values.resize(dim);
    for (double& v : e.values) v = rng.next_gaussian();
    e.normalize();
    return e;
}

std::pair<bool, std::string> retrieval_exactness() {
    Rng rng = derive_rng(1005, "acc-retrieval");
    RetrievalConfig cfg;
    std::size_t trials_ok = 0;
    bool quota_checked = false;

    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 5 + static_cast<int>(rng.next_below(80));
        std::vector<MemoryItem> items;
        for (int i = 0; i < n; ++i) {
            MemoryItem m;
            char id[32];
            std::snprintf(id, sizeof(id), "i-%04d", i);
            m.id = id;
            m.ref = {m.id, m.id};
            m.embedding = random_unit_vec(rng, 6);
            m.score = 1.0 + 4.0 * rng.next_unit();
            items.push_back(std::move(m));
        }
        const Embedding q = random_unit_vec(rng, 6);

        // top-k vs exhaustive sort
        const int k_c = static_cast<int>(rng.next_below(24));
        const auto topk = retrieve_topk(items, q, k_c);
        std::vector<std::pair<double, std::string>> all;
        for (const auto& m : items) all.emplace_back(cosine(m.embedding, q), m.id);
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        const std::size_t want_n = std::min<std::size_t>(static_cast<std::size_t>(k_c), all.size());
        if (topk.size() != want_n) return {false, "top-k size mismatch"};
        for (std::size_t i = 0; i < want_n; ++i) {
            if (topk[i].id != all[i].second) return {false, "top-k order mismatch"};
        }

        // stratified vs the per-bin reference
        const int k_a = static_cast<int>(rng.next_below(24));
        const std::uint64_t rem_seed = 9000 + static_cast<std::uint64_t>(trial);
        Rng r1 = derive_rng(rem_seed, "acc-strat");
        const auto strat = retrieve_stratified(items, q, k_a, cfg, r1);

        Rng r2 = derive_rng(rem_seed, "acc-strat");
        std::vector<int> quota(5, k_a / 5);
        int rem = k_a % 5;
        if (rem > 0) {
            std::vector<int> order{0, 1, 2, 3, 4};
            r2.shuffle(order);
            for (int i = 0; i < rem; ++i) ++quota[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        }
        std::vector<std::string> want;
        std::set<std::string> taken;
        for (int b = 0; b < 5; ++b) {
            std::vector<std::pair<double, std::string>> in_bin;
            std::map<std::string, const MemoryItem*> by_id;
            for (const auto& m : items) by_id[m.id] = &m;
            for (const auto& [sim, id] : all) {
                const double score = by_id[id]->score;
                int bb = static_cast<int>(std::floor((score - 1.0) / 0.8));
                bb = std::clamp(bb, 0, 4);
                if (bb == b) in_bin.emplace_back(sim, id);
            }
            // `all` is already similarity-then-id sorted
            for (int i = 0; i < std::min<int>(quota[static_cast<std::size_t>(b)],
                                              static_cast<int>(in_bin.size()));
                 ++i) {
                want.push_back(in_bin[static_cast<std::size_t>(i)].second);
                taken.insert(want.back());
            }
        }
        for (const auto& [sim, id] : all) {
            if (static_cast<int>(want.size()) >= k_a) break;
            if (!taken.count(id)) want.push_back(id);
        }
        if (strat.size() != want.size()) return {false, "stratified size mismatch"};
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (strat[i].id != want[i]) return {false, "stratified selection mismatch"};
        }
        ++trials_ok;
    }

    // Quota arithmetic with full bins: K_A = 16, B = 5 -> 3 + 3 + 3 + 3 + 3
    // plus one remainder bin at 4.
    {
        std::vector<MemoryItem> items;
        Rng wrng = derive_rng(1006, "acc-quota");
        for (int b = 0; b < 5; ++b) {
            for (int i = 0; i < 8; ++i) {
                MemoryItem m;
                m.id = "q" + std::to_string(b) + "-" + std::to_string(i);
                m.ref = {m.id, m.id};
                m.embedding = random_unit_vec(wrng, 6);
                m.score = 1.0 + 0.8 * b + 0.4;
                items.push_back(std::move(m));
            }
        }
        Rng r = derive_rng(4, "acc-quota-rem");
        const auto sel = retrieve_stratified(items, random_unit_vec(wrng, 6), 16, cfg, r);
        int per_bin[5] = {};
        for (const auto& nb : sel) per_bin[nb.id[1] - '0']++;
        int threes = 0, fours = 0;
        for (int c : per_bin) {
            threes += (c == 3);
            fours += (c == 4);
        }
        quota_checked = (sel.size() == 16 && threes == 4 && fours == 1);
    }

    const bool ok = trials_ok == 1000 && quota_checked;
    return {ok, fmt("%zu/1000 randomized trials exact, per-bin quota 3+remainder honored: %s",
                    trials_ok, quota_checked ? "yes" : "NO")};
}

// ---- criteria 6-8 share the synthetic end-to-end world ----------------------

struct EndToEnd {
    EngineConfig cfg;
    std::filesystem::path dir = work_dir();
    std::string anchors_path, queries_path, bank_path, results_path;
    std::vector<DatasetRecord> queries;
    std::vector<QueryResult> results;
    std::vector<double> latent, baseline, refined;
    double elapsed = 0.0;

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        cfg.pipeline.seed = 20250810;
        cfg.sim.seed = cfg.pipeline.seed;
        cfg.sim.quantization_levels = 5;
        cfg.sim.score_noise = 0.5;
        cfg.sim.comparator_scale = 1.0;
        cfg.sim.comparator_noise = 0.0;
        cfg.anchor_frac = 0.375;  // 300 anchors + 500 queries

        anchors_path = (dir / "anchors.jsonl").string();
        queries_path = (dir / "queries.jsonl").string();
        bank_path = (dir / "am.bank").string();
        results_path = (dir / "results.jsonl").string();

        op_synth(800, cfg, {anchors_path, queries_path});
        SimBackendConfig sim_cfg = cfg.sim;
        sim_cfg.range = cfg.pipeline.range;
        SimulatedBackend backend(sim_cfg);
        sim_load_world(backend, {anchors_path, queries_path});
        op_build_anchors(anchors_path, backend, cfg, bank_path);
        op_run(queries_path, bank_path, backend, cfg, results_path, std::nullopt, std::nullopt);

        queries = read_dataset(queries_path);
        results = read_results(results_path);
        MemoryBank bank = MemoryBank::load(bank_path);
        for (std::size_t i = 0; i < results.size(); ++i) {
            latent.push_back(*queries[i].q);
            refined.push_back(results[i].refined);
            // Baseline column recomputed by a direct oracle run of the
            // simulated scorer plus the stored mapping, independent of the
            // pipeline's bookkeeping.
            const double raw = backend.assess({queries[i].id, queries[i].payload}).raw_score;
            const double mapped = logistic_map(raw, bank.logistic(), cfg.pipeline.range);
            if (mapped != results[i].mapped) {
                fail(ErrorCode::Numeric, "pipeline mapped column deviates from the oracle replay");
            }
            baseline.push_back(mapped);
        }
        elapsed = seconds_since(t0);
    }
};

std::pair<bool, std::string> collapse_mitigation(EndToEnd& world) {
    world.run();
    HistogramSpec spec;  // 100 shared bins over [1,5]

    const double srcc_base = srcc(world.baseline, world.latent);
    const double srcc_refined = srcc(world.refined, world.latent);

    const auto hist_q = histogram(world.latent, spec);
    const auto hist_base = histogram(world.baseline, spec);
    const auto hist_refined = histogram(world.refined, spec);
    const double js_base = js_divergence(hist_base, hist_q);
    const double js_refined = js_divergence(hist_refined, hist_q);
    const double eff_base = entropy_and_effective_bins(hist_base).effective_bins;
    const double eff_refined = entropy_and_effective_bins(hist_refined).effective_bins;

    const bool a = srcc_refined >= srcc_base + 0.05;
    const bool b = js_refined <= 0.5 * js_base;
    const bool c = eff_refined >= 3.0 * eff_base;
    const bool timed = world.elapsed < 120.0;
    return {a && b && c && timed,
            fmt("SRCC %.4f -> %.4f (need +0.05), JS %.4f -> %.4f (need halving), "
                "eff-bins %.2f -> %.2f (need 3x), %.1fs (budget 120s)",
                srcc_base, srcc_refined, js_base, js_refined, eff_base, eff_refined,
                world.elapsed)};
}

std::pair<bool, std::string> order_robustness_criterion(EndToEnd& world) {
    std::vector<StreamQuery> stream;
    for (const auto& r : world.queries) {
        StreamQuery q;
        q.ref = {r.id, r.payload};
        q.gt = r.gt;
        stream.push_back(std::move(q));
    }
    SimBackendConfig sim_cfg = world.cfg.sim;
    sim_cfg.range = world.cfg.pipeline.range;
    SimulatedBackend backend(sim_cfg);
    sim_load_world(backend, {world.anchors_path, world.queries_path});
    PipelineConfig pipeline_cfg = world.cfg.pipeline;
    pipeline_cfg.propagate();

    const RobustnessReport report = order_robustness(
        stream.size(), 5, world.cfg.pipeline.seed, [&](const std::vector<std::size_t>& perm) {
            std::vector<StreamQuery> permuted;
            for (std::size_t idx : perm) permuted.push_back(stream[idx]);
            MemoryBank bank = MemoryBank::load(world.bank_path);
            const auto results = run_stream(permuted, bank, backend, pipeline_cfg);
            std::vector<double> refined, gt;
            for (const auto& r : results) {
                refined.push_back(r.refined);
                gt.push_back(*r.gt);
            }
            return MetricSample{plcc(refined, gt), srcc(refined, gt)};
        });

    const bool ok = report.srcc.stdev <= 0.02 && report.plcc.stdev <= 0.02;
    return {ok, fmt("5 permutations: SRCC %.4f +/- %.4f (tol 0.02), PLCC %.4f +/- %.4f (tol 0.02)",
                    report.srcc.mean, report.srcc.stdev, report.plcc.mean, report.plcc.stdev)};
}

std::pair<bool, std::string> causality_and_determinism(EndToEnd& world) {
    // Replay audit: a CM neighbor must have been consolidated at an earlier
    // stream position than the query that cites it.
    std::map<std::string, std::size_t> position;
    for (std::size_t t = 0; t < world.results.size(); ++t) {
        position[world.results[t].id] = t;
    }
    std::size_t cm_citations = 0;
    for (std::size_t t = 0; t < world.results.size(); ++t) {
        for (const auto& n : world.results[t].neighbors) {
            const auto it = position.find(n.id);
            if (it == position.end()) continue;  // anchor
            ++cm_citations;
            if (it->second >= t) {
                return {false, fmt("query %zu cites CM item '%s' consolidated at position %zu",
                                   t, n.id.c_str(), it->second)};
            }
        }
    }

    // Bit-identical reruns regardless of comparison fan-out.
    auto run_with_threads = [&](int threads, const std::string& name) {
        EngineConfig cfg = world.cfg;
        cfg.pipeline.compare_threads = threads;
        SimBackendConfig sim_cfg = cfg.sim;
        sim_cfg.range = cfg.pipeline.range;
        SimulatedBackend backend(sim_cfg);
        sim_load_world(backend, {world.anchors_path, world.queries_path});
        const std::string out = (world.dir / name).string();
        op_run(world.queries_path, world.bank_path, backend, cfg, out, std::nullopt,
               std::nullopt);
        std::ifstream f(out, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    };
    const std::string serial = run_with_threads(1, "results_serial.jsonl");
    const std::string fanout = run_with_threads(8, "results_fanout.jsonl");
    const bool identical = !serial.empty() && serial == fanout;

    return {identical, fmt("causality audit clean over %zu CM citations; 1-thread vs 8-thread "
                           "result files byte-identical: %s",
                           cm_citations, identical ? "yes" : "NO")};
}

// ---- criterion 9: metrics oracles -------------------------------------------

std::pair<bool, std::string> metrics_oracles() {
    // Exhaustive small inputs with ties: all length-5 sequences over
    // {1, 2, 2, 3} against two fixed partners.
    const double pool[] = {1.0, 2.0, 2.0, 3.0};
    const std::vector<std::vector<double>> partners = {{2, 1, 3, 2, 2}, {1, 2, 3, 4, 2}};
    std::size_t checked = 0;
    double worst = 0.0;
    std::vector<double> x(5);
    for (int mask = 0; mask < 1024; ++mask) {
        int m = mask;
        for (int i = 0; i < 5; ++i) {
            x[static_cast<std::size_t>(i)] = pool[m & 3];
            m >>= 2;
        }
        const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        if (x_const) continue;
        for (const auto& y : partners) {
            worst = std::max(worst, std::abs(srcc(x, y) - static_cast<double>(oracles::spearman(x, y))));
            worst = std::max(worst, std::abs(plcc(x, y) - static_cast<double>(oracles::pearson(x, y))));
            ++checked;
        }
    }

    // JS / entropy against long-double direct evaluation on random vectors.
    Rng rng = derive_rng(1009, "acc-metrics");
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.next_below(7);
        std::vector<double> p(n), q(n);
        double sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.next_unit();
            q[i] = (t % 5 == 0 && i % 2 == 0) ? 0.0 : rng.next_unit();
            sp += p[i];
            sq += q[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        long double js_ref = 0.0L, h_ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            const long double m = 0.5L * (p[i] + q[i]);
            if (p[i] > 0) js_ref += 0.5L * p[i] * std::log2(static_cast<long double>(p[i]) / m);
            if (q[i] > 0) js_ref += 0.5L * q[i] * std::log2(static_cast<long double>(q[i]) / m);
            if (p[i] > 0) h_ref -= p[i] * std::log(static_cast<long double>(p[i]));
        }
        worst = std::max(worst, std::abs(js_divergence(p, q) - static_cast<double>(js_ref)));
        const auto ent = entropy_and_effective_bins(p);
        worst = std::max(worst, std::abs(ent.entropy - static_cast<double>(h_ref)));
        worst = std::max(worst, std::abs(ent.effective_bins - std::exp(ent.entropy)));
    }

    // SRCC invariance under strictly increasing transforms, 100 draws.
    double worst_inv = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 5 + rng.next_below(30);
        std::vector<double> x2(n), y2(n), tx(n);
        for (std::size_t i = 0; i < n; ++i) {
            x2[i] = rng.next_gaussian();
            y2[i] = rng.next_gaussian();
            tx[i] = std::exp(0.5 * x2[i]) + 2.0 * x2[i] + 1.0;
        }
        worst_inv = std::max(worst_inv, std::abs(srcc(tx, y2) - srcc(x2, y2)));
    }

    const bool ok = worst <= 1e-12 && worst_inv <= 1e-12 && checked > 1500;
    return {ok, fmt("%zu exhaustive tie cases, max |metric - brute force| = %.3e, "
                    "max srcc transform drift = %.3e",
                    checked, worst, worst_inv)};
}

// ---- criterion 10: persistence -----------------------------------------------

std::pair<bool, std::string> persistence(EndToEnd& world) {
    // Bank: load -> re-save byte-identically; results: read -> re-write
    // byte-identically.
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    };
    MemoryBank bank = MemoryBank::load(world.bank_path);
    const std::string resaved = (world.dir / "resaved.bank").string();
    bank.save(resaved);
    const bool bank_ok = slurp(world.bank_path) == slurp(resaved);

    const auto results = read_results(world.results_path);
    const std::string rewritten = (world.dir / "rewritten.jsonl").string();
    write_results(rewritten, results);
    const bool results_ok = slurp(world.results_path) == slurp(rewritten);

    // Damage must be loud, never a silent misread.
    const std::string good = slurp(world.bank_path);
    const std::string damaged = (world.dir / "damaged.bank").string();
    bool truncation_named_line = false, checksum_caught = false, flip_caught = false;
    {
        std::ofstream(damaged, std::ios::binary) << good.substr(0, good.size() / 3);
        try {
            (void)MemoryBank::load(damaged);
        } catch (const Error& e) {
            truncation_named_line = std::string(e.what()).find("line") != std::string::npos;
        }
    }
    {
        const auto cut = good.rfind('\n', good.size() - 2);
        std::ofstream(damaged, std::ios::binary) << good.substr(0, cut + 1);
        try {
            (void)MemoryBank::load(damaged);
        } catch (const Error& e) {
            checksum_caught = e.code() == ErrorCode::Data;
        }
    }
    {
        std::string bad = good;
        bad[good.size() / 2] ^= 1;
        std::ofstream(damaged, std::ios::binary) << bad;
        try {
            (void)MemoryBank::load(damaged);
        } catch (const Error&) {
            flip_caught = true;
        }
    }

    const bool ok = bank_ok && results_ok && truncation_named_line && checksum_caught && flip_caught;
    return {ok, fmt("bank re-save identical: %s, results re-write identical: %s, truncation "
                    "names line: %s, trailer loss caught: %s, bit flip caught: %s",
                    bank_ok ? "yes" : "NO", results_ok ? "yes" : "NO",
                    truncation_named_line ? "yes" : "NO", checksum_caught ? "yes" : "NO",
                    flip_caught ? "yes" : "NO")};
}

}  // namespace

int main() {
    Harness h;
    EndToEnd world;

    h.run("fusion closed-form identity vs ridge minimizer", closed_form_identity);
    h.run("exact solver vs dense grid scan", exact_solver_optimality);
    h.run("probit utilities vs integration oracle", probit_utilities);
    h.run("logistic calibration recovery", logistic_calibration);
    h.run("retrieval exactness vs brute force", retrieval_exactness);
    h.run("end-to-end collapse mitigation", [&] { return collapse_mitigation(world); });
    h.run("order robustness over stream permutations",
          [&] { return order_robustness_criterion(world); });
    h.run("causality audit and fan-out determinism",
          [&] { return causality_and_determinism(world); });
    h.run("metrics vs exhaustive brute force", metrics_oracles);
    h.run("persistence round-trips and damage detection", [&] { return persistence(world); });

    std::printf("%d/%d criteria passed\n", h.index - h.failures, h.index);
    return h.failures;
}
