#include "core/formats.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "core/version.hpp"

namespace merank {

namespace {

using nlohmann::json;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << text;
    if (!f) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

json parse_line(const std::string& path, const std::string& line, std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception&) {
        fail(ErrorCode::Data, path + ": malformed record at line " + std::to_string(lineno));
    }
}

json eval_report_json(const EvalReport& r) {
    return json{{"effective_bins", r.effective_bins}, {"entropy", r.entropy},
                {"histogram_pred", r.pred_hist},      {"histogram_ref", r.ref_hist},
                {"js", r.js},                         {"n", r.n},
                {"plcc", r.plcc},                     {"srcc", r.srcc}};
}

}  // namespace

std::vector<DatasetRecord> read_dataset(const std::string& path) {
    std::vector<DatasetRecord> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json j = parse_line(path, lines[i], i + 1);
        DatasetRecord r;
        try {
            r.id = j.at("id").get<std::string>();
            r.payload = j.contains("payload") ? j["payload"].get<std::string>() : r.id;
            if (j.contains("gt")) r.gt = j["gt"].get<double>();
            if (j.contains("q")) r.q = j["q"].get<double>();
            if (j.contains("content")) r.content = j["content"].get<std::vector<double>>();
        } catch (const json::exception&) {
            fail(ErrorCode::Data, path + ": malformed record at line " + std::to_string(i + 1));
        }
        out.push_back(std::move(r));
    }
    if (out.empty()) fail(ErrorCode::Data, path + ": no records");
    return out;
}

void write_dataset(const std::string& path, std::span<const DatasetRecord> records) {
    std::ostringstream out;
    for (const auto& r : records) {
        json j{{"id", r.id}, {"payload", r.payload}};
        if (r.gt) j["gt"] = *r.gt;
        if (r.q) j["q"] = *r.q;
        if (r.content) j["content"] = *r.content;
        out << j.dump() << '\n';
    }
    write_text(path, out.str());
}

void write_results(const std::string& path, std::span<const QueryResult> results) {
    std::ostringstream out;
    for (const auto& r : results) {
        json j{{"id", r.id}};
        if (r.error) {
            j["error"] = *r.error;
        } else {
            j["raw"] = r.raw;
            j["mapped"] = r.mapped;
            j["refined"] = r.refined;
            j["reflected"] = r.reflected;
            json nbrs = json::array();
            for (const auto& n : r.neighbors) {
                nbrs.push_back(json{{"id", n.id}, {"score", n.score}, {"y", n.preference}});
            }
            j["neighbors"] = std::move(nbrs);
        }
        if (r.gt) j["gt"] = *r.gt;
        out << j.dump() << '\n';
    }
    write_text(path, out.str());
}

std::vector<QueryResult> read_results(const std::string& path) {
    std::vector<QueryResult> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json j = parse_line(path, lines[i], i + 1);
        QueryResult r;
        try {
            r.id = j.at("id").get<std::string>();
            if (j.contains("gt")) r.gt = j["gt"].get<double>();
            if (j.contains("error")) {
                r.error = j["error"].get<std::string>();
            } else {
                r.raw = j.at("raw").get<double>();
                r.mapped = j.at("mapped").get<double>();
                r.refined = j.at("refined").get<double>();
                r.reflected = j.at("reflected").get<bool>();
                for (const auto& n : j.at("neighbors")) {
                    r.neighbors.push_back({n.at("id").get<std::string>(),
                                           n.at("score").get<double>(),
                                           n.at("y").get<double>()});
                }
            }
        } catch (const json::exception&) {
            fail(ErrorCode::Data, path + ": malformed record at line " + std::to_string(i + 1));
        }
        out.push_back(std::move(r));
    }
    if (out.empty()) fail(ErrorCode::Data, path + ": no records");
    return out;
}

EvalDocument evaluate_result_files(std::span<const std::string> paths, const HistogramSpec& spec) {
    if (paths.empty()) fail(ErrorCode::InvalidArgument, "eval needs at least one results file");
    EvalDocument doc;
    std::vector<double> b_plcc, b_srcc, r_plcc, r_srcc;
    std::vector<std::size_t> sizes;
    for (const auto& path : paths) {
        const auto results = read_results(path);
        std::vector<double> mapped, refined, gt;
        for (const auto& r : results) {
            if (r.error) continue;
            if (!r.gt) fail(ErrorCode::Data, path + ": record '" + r.id + "' carries no gt");
            mapped.push_back(r.mapped);
            refined.push_back(r.refined);
            gt.push_back(*r.gt);
        }
        if (gt.size() < 3) fail(ErrorCode::Data, path + ": too few evaluable records");
        FileEval fe;
        fe.path = path;
        fe.n = gt.size();
        fe.baseline = evaluate(mapped, gt, spec);
        fe.refined = evaluate(refined, gt, spec);
        b_plcc.push_back(fe.baseline.plcc);
        b_srcc.push_back(fe.baseline.srcc);
        r_plcc.push_back(fe.refined.plcc);
        r_srcc.push_back(fe.refined.srcc);
        sizes.push_back(fe.n);
        doc.files.push_back(std::move(fe));
    }
    doc.wavg_baseline_plcc = wavg(b_plcc, sizes);
    doc.wavg_baseline_srcc = wavg(b_srcc, sizes);
    doc.wavg_refined_plcc = wavg(r_plcc, sizes);
    doc.wavg_refined_srcc = wavg(r_srcc, sizes);
    return doc;
}

void write_eval_document(const std::string& path, const EvalDocument& doc) {
    json files = json::array();
    for (const auto& fe : doc.files) {
        files.push_back(json{{"baseline", eval_report_json(fe.baseline)},
                             {"n", fe.n},
                             {"path", fe.path},
                             {"refined", eval_report_json(fe.refined)}});
    }
    const json j{{"files", files},
                 {"wavg", json{{"baseline", json{{"plcc", doc.wavg_baseline_plcc},
                                                 {"srcc", doc.wavg_baseline_srcc}}},
                               {"refined", json{{"plcc", doc.wavg_refined_plcc},
                                                {"srcc", doc.wavg_refined_srcc}}}}}};
    write_text(path, j.dump(2) + "\n");
}

void write_robustness_report(const std::string& path, const RobustnessReport& report,
                             std::span<const double> plcc_runs, std::span<const double> srcc_runs) {
    const json j{{"plcc", json{{"mean", report.plcc.mean},
                               {"std", report.plcc.stdev},
                               {"runs", std::vector<double>(plcc_runs.begin(), plcc_runs.end())}}},
                 {"runs", report.runs},
                 {"srcc", json{{"mean", report.srcc.mean},
                               {"std", report.srcc.stdev},
                               {"runs", std::vector<double>(srcc_runs.begin(), srcc_runs.end())}}}};
    write_text(path, j.dump(2) + "\n");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::Data,
                 path + ": malformed config entry at line " + std::to_string(lineno));
        }
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    const json j{{"command", manifest.command},
                 {"config", manifest.config},
                 {"finished_at", manifest.finished_at},
                 {"inputs", manifest.inputs},
                 {"outputs", manifest.outputs},
                 {"started_at", manifest.started_at},
                 {"stats", manifest.stats},
                 {"tool_version", MERANK_VERSION_STRING}};
    write_text(path, j.dump(2) + "\n");
}

std::string iso8601_utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace merank
