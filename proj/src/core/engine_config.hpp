#pragma once

#include <map>
#include <string>

#include "core/pipeline.hpp"
#include "core/sim_backend.hpp"

namespace merank {

// All tunables of the engine, assembled from a flat key=value map (config
// file, C API setters, CLI flags). Unknown keys are rejected so typos
// surface immediately.
struct EngineConfig {
    PipelineConfig pipeline;
    SimBackendConfig sim;
    double anchor_frac = 0.3;      // synth: fraction routed to the anchor file
    int external_timeout_ms = 10000;
    int external_retries = 2;

    // Applies one key. Throws InvalidArgument for unknown keys or
    // unparseable values.
    void set(const std::string& key, const std::string& value);

    void apply(const std::map<std::string, std::string>& kv);

    // Effective values, for manifests and introspection.
    std::map<std::string, std::string> snapshot() const;

    void validate() const;
};

}  // namespace merank
