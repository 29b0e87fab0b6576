#include "core/ops.hpp"

#include <cmath>
#include <cstdio>

#include "core/rng.hpp"

namespace merank {

namespace {

RunManifest start_manifest(const std::string& command, const EngineConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.config = cfg.snapshot();
    m.started_at = iso8601_utc_now();
    return m;
}

void finish_manifest(RunManifest& m, const std::string& primary_output) {
    m.finished_at = iso8601_utc_now();
    write_manifest(primary_output + ".manifest.json", m);
}

PipelineConfig effective_pipeline(const EngineConfig& cfg) {
    PipelineConfig p = cfg.pipeline;
    p.propagate();
    p.validate();
    return p;
}

std::vector<StreamQuery> to_stream(const std::vector<DatasetRecord>& records) {
    std::vector<StreamQuery> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        StreamQuery q;
        q.ref = {r.id, r.payload};
        q.gt = r.gt;
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace

void op_synth(int n, const EngineConfig& cfg, const SynthPaths& paths) {
    cfg.validate();
    if (n < 1) fail(ErrorCode::InvalidArgument, "synth: n must be >= 1");
    RunManifest manifest = start_manifest("synth", cfg);

    const ScoreRange range = cfg.pipeline.range;
    const std::size_t content_dim = SimulatedBackend::kContentDims;
    Rng rng = derive_rng(cfg.pipeline.seed, "synth");

    std::vector<DatasetRecord> anchors, queries;
    const int n_anchors = static_cast<int>(std::lround(cfg.anchor_frac * n));
    for (int i = 0; i < n; ++i) {
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "item-%05d", i);
        DatasetRecord r;
        r.id = idbuf;
        r.payload = idbuf;
        const double q = range.lo + rng.next_unit() * range.width();
        std::vector<double> content(content_dim);
        double norm = 0.0;
        for (double& c : content) {
            c = rng.next_gaussian();
            norm += c * c;
        }
        norm = std::sqrt(norm);
        for (double& c : content) c /= norm;
        r.q = q;
        r.gt = q;
        r.content = std::move(content);
        (i < n_anchors ? anchors : queries).push_back(std::move(r));
    }
    if (anchors.empty() || queries.empty()) {
        fail(ErrorCode::InvalidArgument, "synth: anchor_frac leaves one split empty");
    }

    write_dataset(paths.anchors_out, anchors);
    write_dataset(paths.queries_out, queries);

    manifest.inputs["n"] = std::to_string(n);
    manifest.outputs["anchors"] = paths.anchors_out;
    manifest.outputs["queries"] = paths.queries_out;
    manifest.stats["anchor_count"] = std::to_string(anchors.size());
    manifest.stats["query_count"] = std::to_string(queries.size());
    finish_manifest(manifest, paths.anchors_out);
}

void sim_load_world(SimulatedBackend& backend, const std::vector<std::string>& world_paths) {
    for (const auto& path : world_paths) {
        for (const auto& r : read_dataset(path)) {
            if (!r.is_synthetic()) {
                fail(ErrorCode::Data,
                     path + ": record '" + r.id + "' lacks synthetic fields (q, content)");
            }
            backend.add_item({r.id, *r.q, *r.content});
        }
    }
}

void op_build_anchors(const std::string& dataset_path, QualityBackend& backend,
                      const EngineConfig& cfg, const std::string& bank_out) {
    cfg.validate();
    RunManifest manifest = start_manifest("build-anchors", cfg);

    const auto records = read_dataset(dataset_path);
    std::vector<LabeledImage> labeled;
    labeled.reserve(records.size());
    for (const auto& r : records) {
        if (!r.gt) fail(ErrorCode::Data, dataset_path + ": record '" + r.id + "' carries no gt");
        labeled.push_back({{r.id, r.payload}, *r.gt});
    }

    MemoryBank bank = build_anchor_memory(labeled, backend, effective_pipeline(cfg));
    bank.save(bank_out, SaveFilter::AnchorsOnly);

    std::size_t reflected = 0;
    for (const auto& m : bank.anchors()) reflected += m.reflected;
    manifest.inputs["dataset"] = dataset_path;
    manifest.outputs["bank"] = bank_out;
    manifest.stats["anchor_count"] = std::to_string(bank.anchors().size());
    manifest.stats["reflected_count"] = std::to_string(reflected);
    finish_manifest(manifest, bank_out);
}

void op_run(const std::string& stream_path, const std::string& bank_path,
            QualityBackend& backend, const EngineConfig& cfg, const std::string& results_out,
            const std::optional<std::string>& cm_in, const std::optional<std::string>& cm_out) {
    cfg.validate();
    RunManifest manifest = start_manifest("run", cfg);

    MemoryBank bank = MemoryBank::load(bank_path);
    if (cm_in) bank.merge_contrasts_from(*cm_in);

    const auto records = read_dataset(stream_path);
    const auto stream = to_stream(records);
    const auto results = run_stream(stream, bank, backend, effective_pipeline(cfg));
    write_results(results_out, results);
    if (cm_out) bank.save(*cm_out, SaveFilter::ContrastsOnly);

    std::size_t reflected = 0, failed = 0;
    double total_ms = 0.0;
    for (const auto& r : results) {
        reflected += r.reflected;
        failed += r.error.has_value();
        total_ms += r.wall_ms;
    }
    manifest.inputs["stream"] = stream_path;
    manifest.inputs["bank"] = bank_path;
    if (cm_in) manifest.inputs["cm_in"] = *cm_in;
    manifest.outputs["results"] = results_out;
    if (cm_out) manifest.outputs["cm_out"] = *cm_out;
    manifest.stats["query_count"] = std::to_string(results.size());
    manifest.stats["reflected_count"] = std::to_string(reflected);
    manifest.stats["failed_count"] = std::to_string(failed);
    manifest.stats["total_wall_ms"] = std::to_string(total_ms);
    finish_manifest(manifest, results_out);
}

void op_eval(const std::vector<std::string>& results_paths, const EngineConfig& cfg,
             const std::string& report_out) {
    cfg.validate();
    RunManifest manifest = start_manifest("eval", cfg);

    HistogramSpec spec;
    spec.range = cfg.pipeline.range;
    const EvalDocument doc = evaluate_result_files(results_paths, spec);
    write_eval_document(report_out, doc);

    for (std::size_t i = 0; i < results_paths.size(); ++i) {
        manifest.inputs["results_" + std::to_string(i)] = results_paths[i];
    }
    manifest.outputs["report"] = report_out;
    finish_manifest(manifest, report_out);
}

void op_permute_eval(const std::string& stream_path, const std::string& bank_path,
                     QualityBackend& backend, const EngineConfig& cfg, int runs,
                     const std::string& report_out) {
    cfg.validate();
    RunManifest manifest = start_manifest("permute-eval", cfg);

    const auto records = read_dataset(stream_path);
    const auto stream = to_stream(records);
    const PipelineConfig pipeline_cfg = effective_pipeline(cfg);

    std::vector<double> plcc_runs, srcc_runs;
    const RobustnessReport report = order_robustness(
        stream.size(), runs, cfg.pipeline.seed,
        [&](const std::vector<std::size_t>& perm) {
            std::vector<StreamQuery> permuted;
            permuted.reserve(stream.size());
            for (std::size_t idx : perm) permuted.push_back(stream[idx]);
            MemoryBank bank = MemoryBank::load(bank_path);  // fresh CM each run
            const auto results = run_stream(permuted, bank, backend, pipeline_cfg);
            std::vector<double> refined, gt;
            for (const auto& r : results) {
                if (r.error) continue;
                if (!r.gt) {
                    fail(ErrorCode::Data,
                         stream_path + ": record '" + r.id + "' carries no gt");
                }
                refined.push_back(r.refined);
                gt.push_back(*r.gt);
            }
            MetricSample s{plcc(refined, gt), srcc(refined, gt)};
            plcc_runs.push_back(s.plcc);
            srcc_runs.push_back(s.srcc);
            return s;
        });
    write_robustness_report(report_out, report, plcc_runs, srcc_runs);

    manifest.inputs["stream"] = stream_path;
    manifest.inputs["bank"] = bank_path;
    manifest.outputs["report"] = report_out;
    manifest.stats["runs"] = std::to_string(runs);
    finish_manifest(manifest, report_out);
}

}  // namespace merank
