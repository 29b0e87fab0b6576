#include "core/engine_config.hpp"

#include <charconv>
#include <cstdio>

namespace merank {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::InvalidArgument, "config '" + key + "': not a number: '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        fail(ErrorCode::InvalidArgument, "config '" + key + "': not an integer: '" + value + "'");
    }
    return v;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void EngineConfig::set(const std::string& key, const std::string& value) {
    if (key == "k") {
        pipeline.retrieval.k = static_cast<int>(parse_int(key, value));
    } else if (key == "bins") {
        pipeline.retrieval.bins = static_cast<int>(parse_int(key, value));
    } else if (key == "lambda") {
        pipeline.fusion.lambda = parse_double(key, value);
    } else if (key == "epsilon") {
        pipeline.reflect_gate = parse_double(key, value);
    } else if (key == "capacity") {
        pipeline.capacity = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "fusion") {
        if (value == "exact") {
            pipeline.fusion.mode = FusionMode::Exact;
        } else if (value == "closed") {
            pipeline.fusion.mode = FusionMode::ClosedForm;
        } else {
            fail(ErrorCode::InvalidArgument, "config 'fusion': expected exact|closed, got '" + value + "'");
        }
    } else if (key == "seed") {
        pipeline.seed = static_cast<std::uint64_t>(parse_int(key, value));
        sim.seed = pipeline.seed;
    } else if (key == "prob_clip") {
        pipeline.fusion.prob_clip = parse_double(key, value);
        sim.prob_clip = pipeline.fusion.prob_clip;
    } else if (key == "score_lo") {
        pipeline.range.lo = parse_double(key, value);
    } else if (key == "score_hi") {
        pipeline.range.hi = parse_double(key, value);
    } else if (key == "compare_threads") {
        pipeline.compare_threads = static_cast<int>(parse_int(key, value));
    } else if (key == "sim_levels") {
        sim.quantization_levels = static_cast<int>(parse_int(key, value));
    } else if (key == "sim_score_noise") {
        sim.score_noise = parse_double(key, value);
    } else if (key == "sim_comparator_scale") {
        sim.comparator_scale = parse_double(key, value);
    } else if (key == "sim_comparator_noise") {
        sim.comparator_noise = parse_double(key, value);
    } else if (key == "sim_embed_quality_weight") {
        sim.embed_quality_weight = parse_double(key, value);
    } else if (key == "anchor_frac") {
        anchor_frac = parse_double(key, value);
    } else if (key == "external_timeout_ms") {
        external_timeout_ms = static_cast<int>(parse_int(key, value));
    } else if (key == "external_retries") {
        external_retries = static_cast<int>(parse_int(key, value));
    } else {
        fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
}

void EngineConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) set(k, v);
}

std::map<std::string, std::string> EngineConfig::snapshot() const {
    return {
        {"k", std::to_string(pipeline.retrieval.k)},
        {"bins", std::to_string(pipeline.retrieval.bins)},
        {"lambda", fmt(pipeline.fusion.lambda)},
        {"epsilon", fmt(pipeline.reflect_gate)},
        {"capacity", std::to_string(pipeline.capacity)},
        {"fusion", pipeline.fusion.mode == FusionMode::Exact ? "exact" : "closed"},
        {"seed", std::to_string(pipeline.seed)},
        {"prob_clip", fmt(pipeline.fusion.prob_clip)},
        {"score_lo", fmt(pipeline.range.lo)},
        {"score_hi", fmt(pipeline.range.hi)},
        {"compare_threads", std::to_string(pipeline.compare_threads)},
        {"sim_levels", std::to_string(sim.quantization_levels)},
        {"sim_score_noise", fmt(sim.score_noise)},
        {"sim_comparator_scale", fmt(sim.comparator_scale)},
        {"sim_comparator_noise", fmt(sim.comparator_noise)},
        {"sim_embed_quality_weight", fmt(sim.embed_quality_weight)},
        {"anchor_frac", fmt(anchor_frac)},
        {"external_timeout_ms", std::to_string(external_timeout_ms)},
        {"external_retries", std::to_string(external_retries)},
    };
}

void EngineConfig::validate() const {
    PipelineConfig p = pipeline;
    p.propagate();
    p.validate();
    SimBackendConfig s = sim;
    s.range = pipeline.range;
    s.validate();
    if (!(anchor_frac > 0.0) || !(anchor_frac < 1.0)) {
        fail(ErrorCode::InvalidArgument, "anchor_frac must lie strictly in (0,1)");
    }
    if (external_timeout_ms < 1) {
        fail(ErrorCode::InvalidArgument, "external_timeout_ms must be >= 1");
    }
    if (external_retries < 0) {
        fail(ErrorCode::InvalidArgument, "external_retries must be >= 0");
    }
}

}  // namespace merank
