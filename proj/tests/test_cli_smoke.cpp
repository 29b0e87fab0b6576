// Drives the installed CLI binary end to end: synth -> build-anchors ->
// run -> eval -> permute-eval, plus exit-code and env-config behavior.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#ifndef MERANK_CLI_PATH
#error "MERANK_CLI_PATH must be defined by the build"
#endif

namespace {

const std::string cli = MERANK_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct Workspace {
    std::filesystem::path dir;
    Workspace() {
        dir = std::filesystem::temp_directory_path() / "merank_cli_smoke";
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    ~Workspace() { std::filesystem::remove_all(dir); }
    std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli full workflow") {
    Workspace ws;
    const std::string out = ws.dir.string();

    REQUIRE(run("synth --n 150 --seed 5 --out " + out) == 0);
    REQUIRE(std::filesystem::exists(ws.p("anchors.jsonl")));
    REQUIRE(std::filesystem::exists(ws.p("queries.jsonl")));
    REQUIRE(std::filesystem::exists(ws.p("anchors.jsonl.manifest.json")));

    REQUIRE(run("build-anchors --dataset " + ws.p("anchors.jsonl") + " --seed 5 --out " +
                ws.p("am.bank")) == 0);
    REQUIRE(std::filesystem::exists(ws.p("am.bank")));

    // Bank header carries the fitted betas and raw range.
    const std::string header = slurp(ws.p("am.bank")).substr(0, 400);
    CHECK(header.find("\"beta\"") != std::string::npos);
    CHECK(header.find("\"raw_lo\"") != std::string::npos);

    REQUIRE(run("run --stream " + ws.p("queries.jsonl") + " --am " + ws.p("am.bank") +
                " --world " + ws.p("anchors.jsonl") + " --seed 5 --out " +
                ws.p("results.jsonl")) == 0);
    REQUIRE(std::filesystem::exists(ws.p("results.jsonl")));

    // Same invocation twice: byte-identical results.
    REQUIRE(run("run --stream " + ws.p("queries.jsonl") + " --am " + ws.p("am.bank") +
                " --world " + ws.p("anchors.jsonl") + " --seed 5 --out " +
                ws.p("results_b.jsonl")) == 0);
    CHECK(slurp(ws.p("results.jsonl")) == slurp(ws.p("results_b.jsonl")));

    REQUIRE(run("eval --results " + ws.p("results.jsonl") + " --report " +
                ws.p("report.json")) == 0);
    CHECK(slurp(ws.p("report.json")).find("\"plcc\"") != std::string::npos);

    REQUIRE(run("permute-eval --stream " + ws.p("queries.jsonl") + " --am " + ws.p("am.bank") +
                " --world " + ws.p("anchors.jsonl") + " --seed 5 --runs 3 --report " +
                ws.p("robustness.json")) == 0);
    CHECK(slurp(ws.p("robustness.json")).find("\"std\"") != std::string::npos);
}

TEST_CASE("cli k=0 run keeps the mapped score") {
    Workspace ws;
    const std::string out = ws.dir.string();
    REQUIRE(run("synth --n 80 --seed 9 --out " + out) == 0);
    REQUIRE(run("build-anchors --dataset " + ws.p("anchors.jsonl") + " --seed 9 --out " +
                ws.p("am.bank")) == 0);
    REQUIRE(run("run --stream " + ws.p("queries.jsonl") + " --am " + ws.p("am.bank") +
                " --world " + ws.p("anchors.jsonl") + " --seed 9 --k 0 --out " +
                ws.p("results.jsonl")) == 0);
    // Every record has refined == mapped.
    std::ifstream f(ws.p("results.jsonl"));
    std::string line;
    int checked = 0;
    while (std::getline(f, line)) {
        const auto mpos = line.find("\"mapped\":");
        const auto rpos = line.find("\"refined\":");
        REQUIRE(mpos != std::string::npos);
        REQUIRE(rpos != std::string::npos);
        const std::string mapped = line.substr(mpos + 9, line.find(',', mpos) - mpos - 9);
        const std::string refined = line.substr(rpos + 10, line.find(',', rpos) - rpos - 10);
        CHECK(mapped == refined);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("cli exit codes") {
    Workspace ws;
    CHECK(run("no-such-command") == 1);               // usage
    CHECK(run("synth") == 1);                         // missing required flag
    CHECK(run("eval --results /no/such.jsonl --report " + ws.p("r.json")) == 2);  // data
    REQUIRE(run("synth --n 40 --seed 1 --out " + ws.dir.string()) == 0);
    // Unknown backend name is a usage error.
    CHECK(run("build-anchors --dataset " + ws.p("anchors.jsonl") + " --out " +
              ws.p("am.bank") + " --backend martian") == 1);
    // Backend that cannot resolve refs: build against an empty world.
    std::ofstream(ws.p("noworld.jsonl")) << R"({"id":"a","payload":"a","gt":3.0})" << "\n";
    CHECK(run("build-anchors --dataset " + ws.p("noworld.jsonl") + " --out " + ws.p("am.bank")) ==
          2);  // not synthetic records -> data error
    // Unreachable external service is a backend error.
    CHECK(run("build-anchors --dataset " + ws.p("anchors.jsonl") + " --out " + ws.p("am.bank") +
              " --backend external:http://127.0.0.1:1") == 3);
}

TEST_CASE("cli env config: MERANK_CONFIG and MERANK_SEED with flag precedence") {
    Workspace ws;
    const std::string cfg_path = ws.p("env.cfg");
    std::ofstream(cfg_path) << "seed = 1\n";

    // Env seed applies when no flag is given.
    const std::string env = "MERANK_CONFIG=" + cfg_path + " MERANK_SEED=5 ";
    auto run_env = [&](const std::string& args) {
        const std::string cmd = env + cli + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    REQUIRE(run_env("synth --n 40 --out " + ws.dir.string()) == 0);
    const std::string env_out = slurp(ws.p("anchors.jsonl"));

    REQUIRE(run("synth --n 40 --seed 5 --out " + ws.dir.string()) == 0);
    CHECK(slurp(ws.p("anchors.jsonl")) == env_out);  // MERANK_SEED overrode the file's seed=1

    // Flags override both.
    REQUIRE(run_env("synth --n 40 --seed 7 --out " + ws.dir.string()) == 0);
    const std::string flag_out = slurp(ws.p("anchors.jsonl"));
    REQUIRE(run("synth --n 40 --seed 7 --out " + ws.dir.string()) == 0);
    CHECK(slurp(ws.p("anchors.jsonl")) == flag_out);
}
