#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/backend.hpp"

namespace merank {

// Desk-scale stand-in for an image with a known mean opinion score.
struct SyntheticItem {
    std::string id;
    double quality = 3.0;              // latent MOS in the score range
    std::vector<double> content;       // unit-norm content vector
};

struct SimBackendConfig {
    // Number of equally spaced score levels on the range; 0 disables
    // quantization entirely (continuous scoring).
    int quantization_levels = 5;
    double score_noise = 0.5;          // sigma_s, gaussian noise before quantization
    double comparator_scale = 1.0;     // sigma_c in Phi((q_a - q_b)/sigma_c)
    double comparator_noise = 0.0;     // kappa, beta concentration; 0 = exact probit
    double embed_quality_weight = 0.5; // w, share of embedding mass on quality
    double prob_clip = 1e-6;           // epsilon_p applied to compare outputs
    std::uint64_t seed = 0;
    ScoreRange range;

    void validate() const;
};

// Deterministic simulated oracle. Every operation is a pure function of
// (inputs, seed); two backends with equal config and world return
// bit-identical answers on any platform.
//
// Scoring reproduces the discrete-collapse failure mode: the raw score is
// the latent quality plus gaussian noise snapped to one of L levels, while
// compare() answers from the exact latent probit, so refinement has an
// analytic ground truth.
class SimulatedBackend : public QualityBackend {
public:
    explicit SimulatedBackend(SimBackendConfig cfg);

    // World management. Ids must be unique; re-adding an identical item is
    // a no-op, a conflicting duplicate is an error.
    void add_item(SyntheticItem item);
    std::size_t world_size() const { return world_.size(); }
    bool has_item(const std::string& id) const { return world_.count(id) != 0; }
    const SyntheticItem& item(const std::string& id) const;

    const SimBackendConfig& config() const { return cfg_; }

    Assessment assess(const ImageRef& ref) override;
    double compare(const ImageRef& a, const ImageRef& b) override;
    std::string summarize(const std::string& reasoning) override;
    std::string reflect(const ImageRef& ref, const std::string& reasoning, double initial,
                        double target) override;
    Embedding embed(const std::string& text) override;

    // Snaps a score to the nearest quantization level (identity when
    // quantization is off).
    double quantize(double score) const;

    // The description template used for reasoning and reflection, exposed
    // for golden tests.
    std::string render_description(const SyntheticItem& item, double level) const;

    static constexpr std::size_t kContentDims = 32;
    static constexpr std::size_t kQualityDims = 32;
    static constexpr double kRbfBandwidth = 1.0;
    static constexpr const char* kBoilerplate = "Let me analyze this image step by step. ";

private:
    const SyntheticItem& resolve(const ImageRef& ref) const;

    SimBackendConfig cfg_;
    std::map<std::string, SyntheticItem> world_;
};

}  // namespace merank
