#pragma once

#include <string>

#include "core/backend.hpp"

namespace merank {

// HTTP client for a remote quality service. One JSON POST endpoint per
// operation:
//
//   POST /assess    {image_ref}                                  -> {reasoning, raw_score}
//   POST /compare   {image_a, image_b}                           -> {p_a}
//   POST /summarize {reasoning}                                  -> {description}
//   POST /reflect   {image_ref, reasoning, initial_score, target_score} -> {description}
//   POST /embed     {text}                                       -> {vector:[...]}
//
// image refs travel as {"id":..., "payload":...}. A p_a outside (0,1), a
// non-finite raw_score, or a non-unit embedding is a protocol error.
// Transport failures are retried `retries` times before giving up.
class ExternalBackend : public QualityBackend {
public:
    ExternalBackend(std::string base_url, int timeout_ms = 10000, int retries = 2,
                    double prob_clip = 1e-6);

    Assessment assess(const ImageRef& ref) override;
    double compare(const ImageRef& a, const ImageRef& b) override;
    std::string summarize(const std::string& reasoning) override;
    std::string reflect(const ImageRef& ref, const std::string& reasoning, double initial,
                        double target) override;
    Embedding embed(const std::string& text) override;

private:
    std::string post_json(const std::string& endpoint, const std::string& body) const;

    std::string base_url_;
    int timeout_ms_;
    int retries_;
    double prob_clip_;
};

}  // namespace merank
