#include "core/external_backend.hpp"

#include <algorithm>
#include <cmath>

#include "httplib.h"
#include "json.hpp"

namespace merank {

namespace {

using nlohmann::json;

json ref_json(const ImageRef& ref) {
    return json{{"id", ref.id}, {"payload", ref.payload}};
}

json parse_response(const std::string& endpoint, const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: invalid JSON from " + endpoint);
    }
}

}  // namespace

ExternalBackend::ExternalBackend(std::string base_url, int timeout_ms, int retries,
                                 double prob_clip)
    : base_url_(std::move(base_url)),
      timeout_ms_(timeout_ms),
      retries_(retries),
      prob_clip_(prob_clip) {
    // Trim one trailing slash so endpoint concatenation stays canonical.
    if (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string ExternalBackend::post_json(const std::string& endpoint,
                                       const std::string& body) const {
    std::string last_error;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
        // A fresh client per request keeps concurrent compare() calls safe.
        httplib::Client client(base_url_);
        client.set_connection_timeout(0, timeout_ms_ * 1000);
        client.set_read_timeout(0, timeout_ms_ * 1000);
        client.set_write_timeout(0, timeout_ms_ * 1000);
        auto res = client.Post(endpoint, body, "application/json");
        if (res && res->status == 200) return res->body;
        if (res) {
            last_error = endpoint + " returned HTTP " + std::to_string(res->status);
        } else {
            last_error = endpoint + " transport error: " + httplib::to_string(res.error());
        }
    }
    fail(ErrorCode::Backend, "external backend: " + last_error);
}

Assessment ExternalBackend::assess(const ImageRef& ref) {
    const json req{{"image_ref", ref_json(ref)}};
    const json res = parse_response("/assess", post_json("/assess", req.dump()));
    Assessment a;
    try {
        a.reasoning = res.at("reasoning").get<std::string>();
        a.raw_score = res.at("raw_score").get<double>();
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: /assess response missing fields");
    }
    if (!std::isfinite(a.raw_score)) {
        fail(ErrorCode::Backend, "external backend: /assess returned a non-finite raw_score");
    }
    return a;
}

double ExternalBackend::compare(const ImageRef& a, const ImageRef& b) {
    const json req{{"image_a", ref_json(a)}, {"image_b", ref_json(b)}};
    const json res = parse_response("/compare", post_json("/compare", req.dump()));
    double p;
    try {
        p = res.at("p_a").get<double>();
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: /compare response missing p_a");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        fail(ErrorCode::Backend, "external backend: p_a outside (0,1) is a protocol error");
    }
    return std::clamp(p, prob_clip_, 1.0 - prob_clip_);
}

std::string ExternalBackend::summarize(const std::string& reasoning) {
    const json req{{"reasoning", reasoning}};
    const json res = parse_response("/summarize", post_json("/summarize", req.dump()));
    try {
        return res.at("description").get<std::string>();
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: /summarize response missing description");
    }
}

std::string ExternalBackend::reflect(const ImageRef& ref, const std::string& reasoning,
                                     double initial, double target) {
    const json req{{"image_ref", ref_json(ref)},
                   {"initial_score", initial},
                   {"reasoning", reasoning},
                   {"target_score", target}};
    const json res = parse_response("/reflect", post_json("/reflect", req.dump()));
    try {
        return res.at("description").get<std::string>();
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: /reflect response missing description");
    }
}

Embedding ExternalBackend::embed(const std::string& text) {
    if (text.empty()) fail(ErrorCode::InvalidArgument, "embed: text must be nonempty");
    const json req{{"text", text}};
    const json res = parse_response("/embed", post_json("/embed", req.dump()));
    Embedding e;
    try {
        e.values = res.at("vector").get<std::vector<double>>();
    } catch (const json::exception&) {
        fail(ErrorCode::Backend, "external backend: /embed response missing vector");
    }
    if (e.values.empty() || std::abs(e.norm() - 1.0) > 1e-6) {
        fail(ErrorCode::Backend, "external backend: /embed vector is not unit norm");
    }
    return e;
}

}  // namespace merank
