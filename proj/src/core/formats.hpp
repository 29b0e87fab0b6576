#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/metrics.hpp"
#include "core/pipeline.hpp"
#include "core/sim_backend.hpp"

namespace merank {

// One line of a dataset or query-stream file. Synthetic items carry the
// latent quality and content vector on top of the generic
// {id, payload, gt} stream fields.
struct DatasetRecord {
    std::string id;
    std::string payload;
    std::optional<double> gt;
    std::optional<double> q;
    std::optional<std::vector<double>> content;

    bool is_synthetic() const { return q.has_value() && content.has_value(); }
};

std::vector<DatasetRecord> read_dataset(const std::string& path);
void write_dataset(const std::string& path, std::span<const DatasetRecord> records);

// Result files: one canonical JSON record per query, full precision, no
// volatile fields, so identical runs are byte-identical.
void write_results(const std::string& path, std::span<const QueryResult> results);
std::vector<QueryResult> read_results(const std::string& path);

// Per-file evaluation: baseline (mapped) and refined columns against gt.
struct FileEval {
    std::string path;
    std::size_t n = 0;
    EvalReport baseline;
    EvalReport refined;
};
struct EvalDocument {
    std::vector<FileEval> files;
    // Size-weighted averages across files.
    double wavg_baseline_plcc = 0.0, wavg_baseline_srcc = 0.0;
    double wavg_refined_plcc = 0.0, wavg_refined_srcc = 0.0;
};
EvalDocument evaluate_result_files(std::span<const std::string> paths, const HistogramSpec& spec);
void write_eval_document(const std::string& path, const EvalDocument& doc);

// Robustness report emitted by permute-eval.
void write_robustness_report(const std::string& path, const RobustnessReport& report,
                             std::span<const double> plcc_runs, std::span<const double> srcc_runs);

// Flat key=value configuration file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Reproducibility record written alongside every command's output.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::map<std::string, std::string> config;   // effective values
    std::map<std::string, std::string> stats;
    std::string started_at;
    std::string finished_at;
};
void write_manifest(const std::string& path, const RunManifest& manifest);

std::string iso8601_utc_now();

}  // namespace merank
