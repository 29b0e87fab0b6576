#include "core/retrieval.hpp"

#include <algorithm>
#include <cmath>

namespace merank {

namespace {

struct Candidate {
    const MemoryItem* item;
    double similarity;
};

bool nearer(const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.item->id < b.item->id;
}

ScoredNeighbor to_neighbor(const Candidate& c) {
    return ScoredNeighbor{c.item->id,       c.item->ref,    c.item->score,
                          c.similarity,     c.item->origin, c.item->insert_seq};
}

std::vector<Candidate> scan(std::span<const MemoryItem> items, const Embedding& query,
                            std::string_view exclude_id) {
    std::vector<Candidate> out;
    out.reserve(items.size());
    for (const auto& m : items) {
        if (m.id == exclude_id) continue;
        out.push_back({&m, cosine(m.embedding, query)});
    }
    return out;
}

}  // namespace

void RetrievalConfig::validate() const {
    if (k < 0) fail(ErrorCode::InvalidArgument, "retrieval budget K must be >= 0");
    if (bins < 1) fail(ErrorCode::InvalidArgument, "stratification bins B must be >= 1");
    range.validate();
}

std::pair<int, int> split_budget(int k) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "split_budget: K must be >= 1");
    const int k_a = k / 2;
    return {k_a, k - k_a};
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        fail(ErrorCode::InvalidArgument, "cosine: embedding dimensions differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

std::vector<ScoredNeighbor> retrieve_stratified(std::span<const MemoryItem> anchors,
                                                const Embedding& query, int k_a,
                                                const RetrievalConfig& cfg, Rng& rng,
                                                std::string_view exclude_id) {
    cfg.validate();
    if (k_a <= 0) return {};

    std::vector<Candidate> all = scan(anchors, query, exclude_id);
    const int bins = cfg.bins;

    // Partition by stored score into equal-width strata.
    std::vector<std::vector<Candidate>> strata(static_cast<std::size_t>(bins));
    const double width = cfg.range.width() / bins;
    for (const auto& c : all) {
        int b = static_cast<int>(std::floor((c.item->score - cfg.range.lo) / width));
        b = std::clamp(b, 0, bins - 1);  // right-closed last stratum
        strata[static_cast<std::size_t>(b)].push_back(c);
    }

    // Per-stratum quota plus one extra for each of r distinct rng-chosen strata.
    std::vector<int> quota(static_cast<std::size_t>(bins), k_a / bins);
    int remainder = k_a - (k_a / bins) * bins;
    if (remainder > 0) {
        std::vector<int> order(static_cast<std::size_t>(bins));
        for (int i = 0; i < bins; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        for (int i = 0; i < remainder; ++i) ++quota[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }

    std::vector<ScoredNeighbor> selected;
    selected.reserve(static_cast<std::size_t>(k_a));
    std::vector<const MemoryItem*> taken;
    for (int b = 0; b < bins; ++b) {
        auto& s = strata[static_cast<std::size_t>(b)];
        std::sort(s.begin(), s.end(), nearer);
        const int take = std::min<int>(quota[static_cast<std::size_t>(b)], static_cast<int>(s.size()));
        for (int i = 0; i < take; ++i) {
            selected.push_back(to_neighbor(s[static_cast<std::size_t>(i)]));
            taken.push_back(s[static_cast<std::size_t>(i)].item);
        }
    }

    // Backfill underfilled strata with the globally nearest leftovers.
    if (static_cast<int>(selected.size()) < k_a) {
        std::vector<Candidate> rest;
        for (const auto& c : all) {
            if (std::find(taken.begin(), taken.end(), c.item) == taken.end()) rest.push_back(c);
        }
        std::sort(rest.begin(), rest.end(), nearer);
        for (const auto& c : rest) {
            if (static_cast<int>(selected.size()) >= k_a) break;
            selected.push_back(to_neighbor(c));
        }
    }
    return selected;
}

std::vector<ScoredNeighbor> retrieve_topk(std::span<const MemoryItem> items,
                                          const Embedding& query, int k_c,
                                          std::string_view exclude_id) {
    if (k_c <= 0) return {};
    std::vector<Candidate> all = scan(items, query, exclude_id);
    std::sort(all.begin(), all.end(), nearer);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_c), all.size());
    std::vector<ScoredNeighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(to_neighbor(all[i]));
    return out;
}

Neighborhood retrieve_neighborhood(const MemoryBank& bank, const Embedding& query,
                                   std::string_view query_id, const RetrievalConfig& cfg) {
    cfg.validate();
    Neighborhood nb;
    if (cfg.k == 0) return nb;

    auto count_excluding = [&](const std::vector<MemoryItem>& items) {
        int n = 0;
        for (const auto& m : items) n += (m.id != query_id);
        return n;
    };
    const int avail_a = count_excluding(bank.anchors());
    const int avail_c = count_excluding(bank.contrasts());

    auto [k_a, k_c] = split_budget(cfg.k);
    int want_a = std::min(k_a, avail_a);
    int want_c = std::min(k_c, avail_c);
    // Transfer unused slots across stores (e.g. contrast cold start).
    int spare = cfg.k - want_a - want_c;
    const int grow_a = std::min(spare, avail_a - want_a);
    want_a += grow_a;
    spare -= grow_a;
    want_c += std::min(spare, avail_c - want_c);

    Rng rng = derive_rng(cfg.seed, "stratified-remainder", query_id);
    auto am = retrieve_stratified(bank.anchors(), query, want_a, cfg, rng, query_id);
    auto cm = retrieve_topk(bank.contrasts(), query, want_c, query_id);
    nb.items = std::move(am);
    nb.items.insert(nb.items.end(), cm.begin(), cm.end());
    return nb;
}

}  // namespace merank
