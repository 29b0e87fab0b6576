#include "core/memory_bank.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "core/rng.hpp"

namespace merank {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "merank-bank";

double dot(const Embedding& a, const Embedding& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

std::string checksum_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

nlohmann::json item_to_json(const MemoryItem& m) {
    return nlohmann::json{{"description", m.description},
                          {"embedding", m.embedding.values},
                          {"id", m.id},
                          {"insert_seq", m.insert_seq},
                          {"origin", m.origin == Origin::AM ? "AM" : "CM"},
                          {"payload", m.ref.payload},
                          {"ref_id", m.ref.id},
                          {"reflected", m.reflected},
                          {"score", m.score}};
}

MemoryItem item_from_json(const nlohmann::json& j) {
    MemoryItem m;
    m.id = j.at("id").get<std::string>();
    m.ref.id = j.at("ref_id").get<std::string>();
    m.ref.payload = j.at("payload").get<std::string>();
    m.description = j.at("description").get<std::string>();
    m.embedding.values = j.at("embedding").get<std::vector<double>>();
    m.score = j.at("score").get<double>();
    m.reflected = j.at("reflected").get<bool>();
    const auto origin = j.at("origin").get<std::string>();
    if (origin == "AM") {
        m.origin = Origin::AM;
    } else if (origin == "CM") {
        m.origin = Origin::CM;
    } else {
        fail(ErrorCode::Data, "unknown origin '" + origin + "'");
    }
    m.insert_seq = j.at("insert_seq").get<std::uint64_t>();
    return m;
}

}  // namespace

MemoryBank::MemoryBank(std::size_t capacity, ScoreRange range, LogisticParams logistic)
    : capacity_(capacity), range_(range), logistic_(logistic) {
    if (capacity_ == 0) fail(ErrorCode::InvalidArgument, "capacity must be >= 1");
    range_.validate();
    logistic_.validate();
}

void MemoryBank::validate_item(const MemoryItem& item) const {
    if (item.id.empty()) fail(ErrorCode::Data, "memory item id must be nonempty");
    if (ids_.count(item.id)) {
        fail(ErrorCode::Data, "duplicate memory item id '" + item.id + "'");
    }
    if (!range_.contains(item.score)) {
        fail(ErrorCode::Data, "memory item '" + item.id + "': score outside the score range");
    }
    if (embed_dim_ != 0 && item.embedding.dim() != embed_dim_) {
        fail(ErrorCode::Data, "memory item '" + item.id + "': embedding dimension mismatch");
    }
    if (std::abs(item.embedding.norm() - 1.0) > 1e-6) {
        fail(ErrorCode::Data, "memory item '" + item.id + "': embedding is not unit norm");
    }
}

void MemoryBank::insert_anchor(MemoryItem item) {
    if (sealed_) {
        fail(ErrorCode::Immutable, "anchor memory is sealed; cannot insert '" + item.id + "'");
    }
    validate_item(item);
    item.origin = Origin::AM;
    item.insert_seq = next_anchor_seq_++;
    if (embed_dim_ == 0) embed_dim_ = item.embedding.dim();
    ids_.insert(item.id);
    anchors_.push_back(std::move(item));
}

void MemoryBank::insert_contrast(MemoryItem item) {
    validate_item(item);
    item.origin = Origin::CM;
    item.insert_seq = next_contrast_seq_++;
    if (embed_dim_ == 0) embed_dim_ = item.embedding.dim();
    ids_.insert(item.id);
    contrasts_.push_back(std::move(item));
    if (contrasts_.size() > capacity_) prune_contrasts();
}

bool MemoryBank::contains_anchor(const std::string& id) const {
    for (const auto& m : anchors_) {
        if (m.id == id) return true;
    }
    return false;
}

bool MemoryBank::contains_contrast(const std::string& id) const {
    for (const auto& m : contrasts_) {
        if (m.id == id) return true;
    }
    return false;
}

void MemoryBank::erase_contrast(const std::string& id) {
    for (std::size_t i = 0; i < contrasts_.size(); ++i) {
        if (contrasts_[i].id == id) {
            ids_.erase(id);
            contrasts_.erase(contrasts_.begin() + static_cast<std::ptrdiff_t>(i));
            return;
        }
    }
}

void MemoryBank::prune_contrasts() {
    while (contrasts_.size() > capacity_) {
        std::uint64_t newest_seq = 0;
        for (const auto& m : contrasts_) newest_seq = std::max(newest_seq, m.insert_seq);

        // Most redundant candidate: highest max-similarity to any other
        // item; ties fall to the oldest. The newest item is protected.
        std::size_t victim = contrasts_.size();
        double victim_sim = -std::numeric_limits<double>::infinity();
        std::uint64_t victim_seq = 0;
        for (std::size_t i = 0; i < contrasts_.size(); ++i) {
            if (contrasts_[i].insert_seq == newest_seq) continue;
            double max_sim = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < contrasts_.size(); ++j) {
                if (j == i) continue;
                max_sim = std::max(max_sim, dot(contrasts_[i].embedding, contrasts_[j].embedding));
            }
            const bool better =
                max_sim > victim_sim ||
                (max_sim == victim_sim && contrasts_[i].insert_seq < victim_seq);
            if (victim == contrasts_.size() || better) {
                victim = i;
                victim_sim = max_sim;
                victim_seq = contrasts_[i].insert_seq;
            }
        }
        ids_.erase(contrasts_[victim].id);
        contrasts_.erase(contrasts_.begin() + static_cast<std::ptrdiff_t>(victim));
    }
}

void MemoryBank::save(const std::string& path, SaveFilter filter) const {
    std::ostringstream out;
    nlohmann::json header{{"beta", {logistic_.beta1, logistic_.beta2, logistic_.beta3,
                                    logistic_.beta4, logistic_.beta5}},
                          {"capacity", capacity_},
                          {"embed_dim", embed_dim_},
                          {"format", kFormatName},
                          {"raw_hi", logistic_.raw_hi},
                          {"raw_lo", logistic_.raw_lo},
                          {"score_hi", range_.hi},
                          {"score_lo", range_.lo},
                          {"version", kFormatVersion}};
    out << header.dump() << '\n';
    if (filter != SaveFilter::ContrastsOnly) {
        for (const auto& m : anchors_) out << item_to_json(m).dump() << '\n';
    }
    if (filter != SaveFilter::AnchorsOnly) {
        for (const auto& m : contrasts_) out << item_to_json(m).dump() << '\n';
    }
    const std::string body = out.str();
    nlohmann::json trailer{{"checksum", checksum_hex(body)}};

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << body << trailer.dump() << '\n';
    if (!f) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

MemoryBank MemoryBank::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    if (lines.size() < 2) {
        fail(ErrorCode::Data, path + ": malformed bank file (need header and checksum)");
    }

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(lines.front());
    } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::Data, path + ": malformed record at line 1");
    }
    if (!header.contains("format") || header["format"] != kFormatName) {
        fail(ErrorCode::Data, path + ": not a merank bank file");
    }
    if (!header.contains("version") || header["version"].get<int>() != kFormatVersion) {
        fail(ErrorCode::Data, path + ": unsupported bank format version");
    }

    // Verify the trailer before trusting any record.
    nlohmann::json trailer;
    bool trailer_ok = false;
    try {
        trailer = nlohmann::json::parse(lines.back());
        trailer_ok = trailer.is_object() && trailer.contains("checksum");
    } catch (const nlohmann::json::exception&) {
        trailer_ok = false;
    }
    if (!trailer_ok) {
        fail(ErrorCode::Data,
             path + ": malformed record at line " + std::to_string(lines.size()) +
                 " (missing checksum trailer)");
    }
    std::string body;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        body += lines[i];
        body += '\n';
    }
    if (trailer["checksum"].get<std::string>() != checksum_hex(body)) {
        fail(ErrorCode::Data, path + ": checksum mismatch (file corrupted or truncated)");
    }

    ScoreRange range{header.at("score_lo").get<double>(), header.at("score_hi").get<double>()};
    LogisticParams lp;
    const auto beta = header.at("beta").get<std::vector<double>>();
    if (beta.size() != 5) fail(ErrorCode::Data, path + ": header beta must have 5 entries");
    lp.beta1 = beta[0];
    lp.beta2 = beta[1];
    lp.beta3 = beta[2];
    lp.beta4 = beta[3];
    lp.beta5 = beta[4];
    lp.raw_lo = header.at("raw_lo").get<double>();
    lp.raw_hi = header.at("raw_hi").get<double>();

    MemoryBank bank(header.at("capacity").get<std::size_t>(), range, lp);
    bank.embed_dim_ = header.at("embed_dim").get<std::size_t>();

    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        MemoryItem m;
        try {
            m = item_from_json(nlohmann::json::parse(lines[i]));
        } catch (const nlohmann::json::exception&) {
            fail(ErrorCode::Data, path + ": malformed record at line " + std::to_string(i + 1));
        }
        bank.validate_item(m);
        bank.ids_.insert(m.id);
        if (bank.embed_dim_ == 0) bank.embed_dim_ = m.embedding.dim();
        if (m.origin == Origin::AM) {
            bank.anchors_.push_back(std::move(m));
            bank.next_anchor_seq_ = std::max(bank.next_anchor_seq_, bank.anchors_.back().insert_seq + 1);
        } else {
            bank.contrasts_.push_back(std::move(m));
            bank.next_contrast_seq_ =
                std::max(bank.next_contrast_seq_, bank.contrasts_.back().insert_seq + 1);
        }
    }
    bank.seal();
    return bank;
}

void MemoryBank::merge_contrasts_from(const std::string& path) {
    MemoryBank other = load(path);
    std::vector<MemoryItem> items = other.contrasts_;
    std::sort(items.begin(), items.end(),
              [](const MemoryItem& a, const MemoryItem& b) { return a.insert_seq < b.insert_seq; });
    for (auto& m : items) insert_contrast(std::move(m));
}

}  // namespace merank
