#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/engine_config.hpp"
#include "core/formats.hpp"

namespace merank {

// Command-level operations behind the C API and the CLI. Each writes its
// primary output plus one manifest at "<output>.manifest.json".

struct SynthPaths {
    std::string anchors_out;
    std::string queries_out;
};

// Generates n synthetic items (quality uniform over the score range,
// random unit content vectors) and splits them into anchor and query
// files by anchor_frac.
void op_synth(int n, const EngineConfig& cfg, const SynthPaths& paths);

// Loads world files (and any synthetic records of `extra`) into a
// simulated backend.
void sim_load_world(SimulatedBackend& backend, const std::vector<std::string>& world_paths);

// Builds the anchor bank from a labeled dataset file and saves it sealed.
void op_build_anchors(const std::string& dataset_path, QualityBackend& backend,
                      const EngineConfig& cfg, const std::string& bank_out);

// Runs the online stream against a saved anchor bank.
void op_run(const std::string& stream_path, const std::string& bank_path,
            QualityBackend& backend, const EngineConfig& cfg, const std::string& results_out,
            const std::optional<std::string>& cm_in, const std::optional<std::string>& cm_out);

// Evaluates one or more result files and writes the combined report.
void op_eval(const std::vector<std::string>& results_paths, const EngineConfig& cfg,
             const std::string& report_out);

// Order-robustness sweep: seeded permutations of the same stream, each run
// against a fresh copy of the bank.
void op_permute_eval(const std::string& stream_path, const std::string& bank_path,
                     QualityBackend& backend, const EngineConfig& cfg, int runs,
                     const std::string& report_out);

}  // namespace merank
