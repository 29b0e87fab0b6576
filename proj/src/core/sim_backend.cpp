#include "core/sim_backend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <utility>

#include "core/probit.hpp"
#include "core/rng.hpp"

namespace merank {

namespace {

const char* level_word(double level) {
    const int band = static_cast<int>(std::lround(std::clamp(level, 1.0, 5.0)));
    switch (band) {
        case 1: return "bad";
        case 2: return "poor";
        case 3: return "fair";
        case 4: return "good";
        default: return "excellent";
    }
}

std::string format_level(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", level);
    return buf;
}

// Parses "quality level <number>" out of a description; returns false when
// the token is absent.
bool parse_level(const std::string& text, double& level, std::size_t& num_begin,
                 std::size_t& num_end) {
    static const std::string marker = "quality level ";
    const auto pos = text.find(marker);
    if (pos == std::string::npos) return false;
    num_begin = pos + marker.size();
    char* end = nullptr;
    level = std::strtod(text.c_str() + num_begin, &end);
    if (end == text.c_str() + num_begin) return false;
    num_end = static_cast<std::size_t>(end - text.c_str());
    return true;
}

// Gamma(shape, 1) via Marsaglia-Tsang, on the project RNG.
double gamma_sample(Rng& rng, double shape) {
    if (shape < 1.0) {
        const double u = rng.next_unit();
        return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = rng.next_gaussian();
        const double v = std::pow(1.0 + c * x, 3.0);
        if (v <= 0.0) continue;
        const double u = rng.next_unit();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

double beta_sample(Rng& rng, double alpha, double beta) {
    const double x = gamma_sample(rng, alpha);
    const double y = gamma_sample(rng, beta);
    return x / (x + y);
}

}  // namespace

void SimBackendConfig::validate() const {
    range.validate();
    if (quantization_levels < 0) {
        fail(ErrorCode::InvalidArgument, "quantization_levels must be >= 0");
    }
    if (score_noise < 0.0) fail(ErrorCode::InvalidArgument, "score_noise must be >= 0");
    if (!(comparator_scale > 0.0)) {
        fail(ErrorCode::InvalidArgument, "comparator_scale must be > 0");
    }
    if (comparator_noise < 0.0) {
        fail(ErrorCode::InvalidArgument, "comparator_noise must be >= 0");
    }
    if (embed_quality_weight < 0.0 || embed_quality_weight > 1.0) {
        fail(ErrorCode::InvalidArgument, "embed_quality_weight must lie in [0,1]");
    }
    if (!(prob_clip > 0.0) || prob_clip >= 0.5) {
        fail(ErrorCode::InvalidArgument, "prob_clip must lie in (0, 0.5)");
    }
}

SimulatedBackend::SimulatedBackend(SimBackendConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

void SimulatedBackend::add_item(SyntheticItem item) {
    if (!cfg_.range.contains(item.quality)) {
        fail(ErrorCode::Data, "synthetic item '" + item.id + "': quality outside the score range");
    }
    auto it = world_.find(item.id);
    if (it != world_.end()) {
        if (it->second.quality == item.quality && it->second.content == item.content) {
            return;  // redundant reload of the same world file
        }
        fail(ErrorCode::Data, "synthetic item '" + item.id + "': conflicting duplicate id");
    }
    world_.emplace(item.id, std::move(item));
}

const SyntheticItem& SimulatedBackend::item(const std::string& id) const {
    auto it = world_.find(id);
    if (it == world_.end()) {
        fail(ErrorCode::Backend, "unknown image ref '" + id + "'");
    }
    return it->second;
}

const SyntheticItem& SimulatedBackend::resolve(const ImageRef& ref) const {
    return item(ref.id);
}

double SimulatedBackend::quantize(double score) const {
    const int levels = cfg_.quantization_levels;
    if (levels == 0) return cfg_.range.clamp(score);
    if (levels == 1) return 0.5 * (cfg_.range.lo + cfg_.range.hi);
    const double step = cfg_.range.width() / (levels - 1);
    const double k = std::round((cfg_.range.clamp(score) - cfg_.range.lo) / step);
    return cfg_.range.lo + k * step;
}

std::string SimulatedBackend::render_description(const SyntheticItem& item, double level) const {
    // Content tags: the three strongest coordinates of the content vector.
    std::vector<std::size_t> idx(item.content.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(item.content[a]), mb = std::abs(item.content[b]);
        return ma != mb ? ma > mb : a < b;
    });
    std::string tags;
    const std::size_t n_tags = std::min<std::size_t>(3, idx.size());
    for (std::size_t i = 0; i < n_tags; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "motif-%02zu", idx[i]);
        if (i) tags += ' ';
        tags += buf;
    }
    if (tags.empty()) tags = "motif-none";
    return "Content: " + tags + ". Overall quality level " + format_level(level) + " of 5, " +
           level_word(level) + " appearance.";
}

Assessment SimulatedBackend::assess(const ImageRef& ref) {
    const SyntheticItem& it = resolve(ref);
    Rng rng = derive_rng(cfg_.seed, "assess", it.id);
    double noisy = it.quality;
    if (cfg_.score_noise > 0.0) noisy += cfg_.score_noise * rng.next_gaussian();
    Assessment a;
    a.raw_score = quantize(cfg_.range.clamp(noisy));
    a.reasoning = std::string(kBoilerplate) + render_description(it, quantize(it.quality));
    return a;
}

double SimulatedBackend::compare(const ImageRef& a, const ImageRef& b) {
    const SyntheticItem& ia = resolve(a);
    const SyntheticItem& ib = resolve(b);
    double y = normal_cdf((ia.quality - ib.quality) / cfg_.comparator_scale);
    if (cfg_.comparator_noise > 0.0) {
        Rng rng = derive_rng(cfg_.seed, "compare", ia.id + "|" + ib.id);
        const double kappa = cfg_.comparator_noise;
        const double eps = 1e-9;  // keep the beta shape parameters positive
        y = beta_sample(rng, kappa * std::max(y, eps), kappa * std::max(1.0 - y, eps));
    }
    return std::clamp(y, cfg_.prob_clip, 1.0 - cfg_.prob_clip);
}

std::string SimulatedBackend::summarize(const std::string& reasoning) {
    if (reasoning.empty()) {
        std::fprintf(stderr, "merank: warning: summarize called with empty reasoning\n");
        return reasoning;
    }
    const std::string prefix = kBoilerplate;
    if (reasoning.rfind(prefix, 0) == 0) return reasoning.substr(prefix.size());
    return reasoning;
}

std::string SimulatedBackend::reflect(const ImageRef& ref, const std::string& reasoning,
                                      double initial, double target) {
    (void)initial;
    const std::string base = summarize(reasoning);
    const double new_level = quantize(cfg_.range.clamp(target));
    double old_level;
    std::size_t begin, end;
    if (!parse_level(base, old_level, begin, end)) {
        // Unrecognized text: regenerate the whole description.
        return render_description(resolve(ref), new_level);
    }
    // Substitute the level token and the wording that follows it.
    std::string out = base.substr(0, begin) + format_level(new_level);
    std::string tail = base.substr(end);
    const std::string old_word = level_word(old_level);
    const std::string new_word = level_word(new_level);
    const auto word_pos = tail.find(old_word);
    if (word_pos != std::string::npos) {
        tail = tail.substr(0, word_pos) + new_word + tail.substr(word_pos + old_word.size());
    }
    return out + tail;
}

Embedding SimulatedBackend::embed(const std::string& text) {
    if (text.empty()) {
        fail(ErrorCode::InvalidArgument, "embed: text must be nonempty");
    }

    std::array<double, kContentDims> content{};
    std::array<double, kQualityDims> quality{};

    // Content block: feature-hash the tag tokens (or every token when the
    // template is absent, so arbitrary text still embeds).
    std::string token_region = text;
    const auto tag_begin = text.find("Content: ");
    if (tag_begin != std::string::npos) {
        const auto tag_end = text.find('.', tag_begin);
        token_region = text.substr(tag_begin + 9, tag_end == std::string::npos
                                                      ? std::string::npos
                                                      : tag_end - tag_begin - 9);
    }
    std::size_t pos = 0;
    while (pos < token_region.size()) {
        while (pos < token_region.size() && std::isspace(static_cast<unsigned char>(token_region[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < token_region.size() && !std::isspace(static_cast<unsigned char>(token_region[pos]))) ++pos;
        if (pos > start) {
            const std::uint64_t h = fnv1a64(std::string_view(token_region).substr(start, pos - start));
            const std::size_t slot = h % kContentDims;
            content[slot] += (h >> 32) & 1 ? 1.0 : -1.0;
        }
    }

    // Quality block: radial-basis profile of the level over centers 1..5.
    double level;
    std::size_t begin, end;
    if (parse_level(text, level, begin, end)) {
        for (int m = 0; m < 5; ++m) {
            const double d = level - (m + 1);
            quality[static_cast<std::size_t>(m)] =
                std::exp(-d * d / (2.0 * kRbfBandwidth * kRbfBandwidth));
        }
    }

    auto block_norm = [](auto& block) {
        double s = 0.0;
        for (double v : block) s += v * v;
        return std::sqrt(s);
    };
    const double cn = block_norm(content);
    const double qn = block_norm(quality);
    const double w = cfg_.embed_quality_weight;

    Embedding e;
    e.values.resize(kContentDims + kQualityDims, 0.0);
    if (cn > 0.0) {
        for (std::size_t i = 0; i < kContentDims; ++i) {
            e.values[i] = std::sqrt(1.0 - w) * content[i] / cn;
        }
    }
    if (qn > 0.0) {
        for (std::size_t i = 0; i < kQualityDims; ++i) {
            e.values[kContentDims + i] = std::sqrt(w) * quality[i] / qn;
        }
    }
    if (e.norm() < 1e-12) e.values[0] = 1.0;  // degenerate text, pin a direction
    e.normalize();
    return e;
}

}  // namespace merank
