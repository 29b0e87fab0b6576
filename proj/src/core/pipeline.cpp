#include "core/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <utility>

#include "core/scale_map.hpp"

namespace merank {

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

}  // namespace

void PipelineConfig::validate() const {
    range.validate();
    retrieval.validate();
    fusion.validate();
    if (!(reflect_gate > 0.0)) {
        fail(ErrorCode::InvalidArgument, "reflection gate epsilon must be > 0");
    }
    if (capacity == 0) fail(ErrorCode::InvalidArgument, "contrast capacity must be >= 1");
    if (compare_threads < 1) {
        fail(ErrorCode::InvalidArgument, "compare_threads must be >= 1");
    }
}

void PipelineConfig::propagate() {
    retrieval.range = range;
    retrieval.seed = seed;
    fusion.range = range;
}

MemoryBank build_anchor_memory(std::span<const LabeledImage> items, QualityBackend& backend,
                               const PipelineConfig& cfg) {
    cfg.validate();
    if (items.size() < 10) {
        fail(ErrorCode::Data, "anchor construction needs at least 10 labeled items");
    }

    std::vector<Assessment> assessments;
    assessments.reserve(items.size());
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(items.size());
    for (const auto& it : items) {
        if (!cfg.range.contains(it.gt)) {
            fail(ErrorCode::Data, "anchor '" + it.ref.id + "': gt outside the score range");
        }
        assessments.push_back(backend.assess(it.ref));
        pairs.emplace_back(assessments.back().raw_score, it.gt);
    }

    const LogisticParams params = fit_logistic(pairs, cfg.range);
    MemoryBank bank(cfg.capacity, cfg.range, params);

    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        const auto& assessment = assessments[i];
        const double mapped = logistic_map(assessment.raw_score, params, cfg.range);
        const bool reflect = std::abs(it.gt - mapped) > cfg.reflect_gate;
        const std::string description =
            reflect ? backend.reflect(it.ref, assessment.reasoning, mapped, it.gt)
                    : backend.summarize(assessment.reasoning);
        MemoryItem m;
        m.id = it.ref.id;
        m.ref = it.ref;
        m.description = description;
        m.embedding = backend.embed(description);
        m.score = it.gt;
        m.reflected = reflect;
        bank.insert_anchor(std::move(m));
    }
    bank.seal();
    return bank;
}

QueryResult process_query(const ImageRef& query, MemoryBank& bank, QualityBackend& backend,
                          const PipelineConfig& cfg) {
    cfg.validate();
    const double t0 = now_ms();

    QueryResult res;
    res.id = query.id;
    try {
        const Assessment assessment = backend.assess(query);
        res.raw = assessment.raw_score;
        res.mapped = logistic_map(assessment.raw_score, bank.logistic(), cfg.range);

        std::string description = backend.summarize(assessment.reasoning);
        Embedding embedding = backend.embed(description);

        const Neighborhood nb =
            retrieve_neighborhood(bank, embedding, query.id, cfg.retrieval);

        // Fan the comparisons out, then join in neighbor-index order so the
        // schedule cannot influence the outcome. The query is always the
        // first argument.
        const std::size_t n = nb.items.size();
        std::vector<std::optional<double>> prefs(n);
        auto compare_range = [&](std::size_t begin, std::size_t stride) {
            for (std::size_t i = begin; i < n; i += stride) {
                try {
                    prefs[i] = backend.compare(query, nb.items[i].ref);
                } catch (const std::exception& ex) {
                    std::fprintf(stderr,
                                 "merank: warning: compare failed for query '%s' vs '%s': %s\n",
                                 query.id.c_str(), nb.items[i].id.c_str(), ex.what());
                }
            }
        };
        const std::size_t threads =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.compare_threads), std::max<std::size_t>(n, 1));
        if (threads <= 1) {
            compare_range(0, 1);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t) {
                pool.emplace_back(compare_range, t, threads);
            }
            for (auto& th : pool) th.join();
        }

        std::vector<PreferenceEvidence> evidence;
        evidence.reserve(n);
        const double clip = cfg.fusion.prob_clip;
        for (std::size_t i = 0; i < n; ++i) {
            if (!prefs[i]) continue;
            const double y = std::min(std::max(*prefs[i], clip), 1.0 - clip);
            evidence.push_back({nb.items[i].score, y});
            res.neighbors.push_back({nb.items[i].id, nb.items[i].score, y});
        }

        res.refined = evidence.empty() ? cfg.range.clamp(res.mapped)
                                       : fuse(res.mapped, evidence, cfg.fusion);

        res.reflected = std::abs(res.refined - res.mapped) > cfg.reflect_gate;
        if (res.reflected) {
            description = backend.reflect(query, assessment.reasoning, res.mapped, res.refined);
            embedding = backend.embed(description);
        }

        // Consolidate. A re-encountered case refreshes its contrast entry;
        // an id already held by the immutable anchor store is left alone
        // (the anchor carries ground truth).
        if (!bank.contains_anchor(query.id)) {
            bank.erase_contrast(query.id);
            MemoryItem m;
            m.id = query.id;
            m.ref = query;
            m.description = std::move(description);
            m.embedding = std::move(embedding);
            m.score = res.refined;
            m.reflected = res.reflected;
            bank.insert_contrast(std::move(m));
        }
    } catch (const Error& ex) {
        throw Error(ex.code(), "query '" + query.id + "': " + ex.what());
    }

    res.wall_ms = now_ms() - t0;
    return res;
}

std::vector<QueryResult> run_stream(std::span<const StreamQuery> queries, MemoryBank& bank,
                                    QualityBackend& backend, const PipelineConfig& cfg) {
    cfg.validate();
    if (queries.empty()) fail(ErrorCode::Data, "query stream is empty");

    std::vector<QueryResult> results;
    results.reserve(queries.size());
    for (const auto& q : queries) {
        try {
            QueryResult r = process_query(q.ref, bank, backend, cfg);
            r.gt = q.gt;
            results.push_back(std::move(r));
        } catch (const Error& ex) {
            std::fprintf(stderr, "merank: error: %s\n", ex.what());
            QueryResult r;
            r.id = q.ref.id;
            r.gt = q.gt;
            r.error = ex.what();
            results.push_back(std::move(r));
        }
    }
    return results;
}

}  // namespace merank
