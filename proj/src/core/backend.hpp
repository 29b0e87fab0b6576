#pragma once

#include <string>

#include "core/types.hpp"

namespace merank {

// Contract every quality backend fulfils. The pipeline is written against
// this interface only; a backend may be the deterministic simulated oracle,
// an HTTP client talking to a model service, or anything else.
//
// Implementations must tolerate concurrent compare() calls on distinct
// pairs; the pipeline fans the per-query comparisons out over threads and
// joins the answers in neighbor-index order.
class QualityBackend {
public:
    virtual ~QualityBackend() = default;

    // Free-form reasoning plus an initial scalar score for one image.
    virtual Assessment assess(const ImageRef& ref) = 0;

    // Soft preference P(quality(a) > quality(b)), clipped away from {0,1}.
    virtual double compare(const ImageRef& a, const ImageRef& b) = 0;

    // Compresses raw reasoning into a concise quality description.
    virtual std::string summarize(const std::string& reasoning) = 0;

    // Revises the description after the fused score disagreed with the
    // initial one; `target` is the score the revision should reflect.
    virtual std::string reflect(const ImageRef& ref, const std::string& reasoning,
                                double initial, double target) = 0;

    // Text encoder; result has unit L2 norm and a run-constant dimension.
    virtual Embedding embed(const std::string& text) = 0;
};

}  // namespace merank
