#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "core/memory_bank.hpp"
#include "core/rng.hpp"

namespace merank {

struct RetrievalConfig {
    int k = 32;          // total neighborhood budget K
    int bins = 5;        // B score strata for the anchor store
    ScoreRange range;
    std::uint64_t seed = 0;  // drives remainder-bin placement, re-derived per query

    void validate() const;
};

// One retrieved neighbor; owns copies of the fields the pipeline needs so
// later bank mutation cannot invalidate it.
struct ScoredNeighbor {
    std::string id;
    ImageRef ref;
    double score = 0.0;
    double similarity = 0.0;
    Origin origin = Origin::AM;
    std::uint64_t insert_seq = 0;
};

// Anchor block first, contrast block second; never contains the query id.
struct Neighborhood {
    std::vector<ScoredNeighbor> items;
};

// Uniform budget split: K_A = floor(K/2), K_C = K - K_A. Throws on K < 1.
std::pair<int, int> split_budget(int k);

// Dot product of unit vectors. Throws on dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

// GT-stratified anchor search: scores partitioned into `bins` equal-width
// strata over the score range (last stratum right-closed); floor(k_a/bins)
// highest-cosine items per stratum, the remainder going one-each to
// distinct rng-chosen strata; underfilled strata donate their deficit to
// the globally nearest unselected anchors. Similarity ties break toward
// the smaller item id. Exact (full linear scan).
std::vector<ScoredNeighbor> retrieve_stratified(std::span<const MemoryItem> anchors,
                                                const Embedding& query, int k_a,
                                                const RetrievalConfig& cfg, Rng& rng,
                                                std::string_view exclude_id = {});

// Plain exact top-k by cosine, ties toward the smaller id.
std::vector<ScoredNeighbor> retrieve_topk(std::span<const MemoryItem> items,
                                          const Embedding& query, int k_c,
                                          std::string_view exclude_id = {});

// Joint search over both stores under the fixed budget K. When one store
// cannot fill its half, the unused slots transfer to the other store.
Neighborhood retrieve_neighborhood(const MemoryBank& bank, const Embedding& query,
                                   std::string_view query_id, const RetrievalConfig& cfg);

}  // namespace merank
