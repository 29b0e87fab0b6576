#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/backend.hpp"
#include "core/fusion.hpp"
#include "core/memory_bank.hpp"
#include "core/retrieval.hpp"

namespace merank {

struct PipelineConfig {
    RetrievalConfig retrieval;     // K, B, range, seed
    FusionConfig fusion;           // lambda, clip, mode, range
    double reflect_gate = 0.75;    // epsilon: |refined - mapped| beyond it triggers reflection
    std::size_t capacity = 1024;   // contrast-store bound C
    ScoreRange range;
    std::uint64_t seed = 0;
    int compare_threads = 1;       // fan-out for the K comparisons of one query

    void validate() const;
    // Keeps the per-module range/seed copies in sync with the top level.
    void propagate();
};

struct NeighborTrace {
    std::string id;
    double score = 0.0;       // s_j*, the stored neighbor score
    double preference = 0.5;  // y_ij
};

// Full per-query trace of the online loop.
struct QueryResult {
    std::string id;
    double raw = 0.0;      // backend's initial scalar
    double mapped = 0.0;   // after the logistic scale map
    double refined = 0.0;  // after Thurstone fusion
    std::vector<NeighborTrace> neighbors;
    bool reflected = false;
    std::optional<double> gt;          // carried through for evaluation only
    double wall_ms = 0.0;              // in-memory only; not serialized
    std::optional<std::string> error;  // set when the query failed
};

struct LabeledImage {
    ImageRef ref;
    double gt = 0.0;
};

struct StreamQuery {
    ImageRef ref;
    std::optional<double> gt;  // never read by the pipeline
};

// Offline anchor construction: assess everything, fit the logistic map,
// reflect items whose mapped score disagrees with ground truth beyond the
// gate, embed, store with the GT as the anchor score, and seal.
MemoryBank build_anchor_memory(std::span<const LabeledImage> items, QualityBackend& backend,
                               const PipelineConfig& cfg);

// One step of the online loop:
//   assess -> map -> summarize -> embed -> retrieve -> compare (query is
//   always the first argument) -> fuse -> reflection gate -> consolidate.
// A failed comparison drops that neighbor from the evidence; it never
// aborts the query. Backend errors propagate with the query id attached.
QueryResult process_query(const ImageRef& query, MemoryBank& bank, QualityBackend& backend,
                          const PipelineConfig& cfg);

// Strictly-ordered processing: query t sees only anchors plus contrast
// items consolidated at times < t. Per-query failures are recorded in the
// result row and the stream continues.
std::vector<QueryResult> run_stream(std::span<const StreamQuery> queries, MemoryBank& bank,
                                    QualityBackend& backend, const PipelineConfig& cfg);

}  // namespace merank
