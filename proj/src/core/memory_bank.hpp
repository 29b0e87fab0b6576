#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "core/scale_map.hpp"
#include "core/types.hpp"

namespace merank {

enum class Origin { AM, CM };

// One consolidated case: the image, its (possibly reflected) quality
// description with embedding, and the stored score — ground truth for
// anchors, the refined estimate for contrast items.
struct MemoryItem {
    std::string id;
    ImageRef ref;
    std::string description;
    Embedding embedding;
    double score = 0.0;
    bool reflected = false;
    Origin origin = Origin::AM;
    std::uint64_t insert_seq = 0;
};

enum class SaveFilter { All, AnchorsOnly, ContrastsOnly };

// Hybrid memory bank: a static Anchor Memory built offline and sealed, and
// a capacity-bounded Contrast Memory grown online. Single-writer between
// queries; read-only retrieval may run concurrently within a query.
class MemoryBank {
public:
    MemoryBank(std::size_t capacity, ScoreRange range, LogisticParams logistic);

    // Anchor store, valid only before seal(). Assigns insert_seq.
    void insert_anchor(MemoryItem item);
    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    // Contrast store. Assigns insert_seq and prunes back to capacity.
    void insert_contrast(MemoryItem item);

    // Evicts most-redundant contrast items (highest max cosine similarity
    // to any other contrast item) until the store fits the capacity. The
    // most recently inserted item is never the one evicted; similarity
    // ties evict the smaller insert_seq first.
    void prune_contrasts();

    const std::vector<MemoryItem>& anchors() const { return anchors_; }
    const std::vector<MemoryItem>& contrasts() const { return contrasts_; }

    bool contains_anchor(const std::string& id) const;
    bool contains_contrast(const std::string& id) const;

    // Drops one contrast item; unknown ids are ignored.
    void erase_contrast(const std::string& id);

    std::size_t capacity() const { return capacity_; }
    ScoreRange score_range() const { return range_; }
    const LogisticParams& logistic() const { return logistic_; }
    void set_logistic(const LogisticParams& p) { logistic_ = p; }

    // 0 until the first item is inserted, then pinned for the bank's life.
    std::size_t embed_dim() const { return embed_dim_; }

    std::uint64_t next_contrast_seq() const { return next_contrast_seq_; }

    // Canonical JSONL persistence: header, anchor records, contrast
    // records, checksum trailer. Re-saving a loaded bank reproduces the
    // file byte for byte.
    void save(const std::string& path, SaveFilter filter = SaveFilter::All) const;
    static MemoryBank load(const std::string& path);

    // Merges contrast items from a previously saved file (fresh
    // insert_seq, capacity enforced).
    void merge_contrasts_from(const std::string& path);

private:
    void validate_item(const MemoryItem& item) const;

    std::vector<MemoryItem> anchors_;
    std::vector<MemoryItem> contrasts_;
    std::unordered_set<std::string> ids_;
    std::size_t capacity_;
    ScoreRange range_;
    LogisticParams logistic_;
    bool sealed_ = false;
    std::size_t embed_dim_ = 0;
    std::uint64_t next_anchor_seq_ = 0;
    std::uint64_t next_contrast_seq_ = 0;
};

}  // namespace merank
