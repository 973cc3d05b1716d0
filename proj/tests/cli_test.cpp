#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "lspkit/bench/harness.hpp"
#include "toy_library.hpp"

namespace fs = std::filesystem;
using namespace lspkit;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    Result r;
    FILE* p = popen((std::string(LSPKIT_CLI) + " " + args + " 2>&1").c_str(), "r");
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), p)) {
        r.out += buf.data();
    }
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root() = fs::temp_directory_path() / "lspkit_cli_test";
        fs::remove_all(root());
        const auto params = load_domain_params(default_params_path());
        const SkillLibrary lib = toy::library(params);
        for (const auto& s : lib.skills()) {
            save_value_function(root() / "lib", lib.at(s).value);
        }
    }
    static void TearDownTestSuite() { fs::remove_all(root()); }

    static fs::path& root() {
        static fs::path r;
        return r;
    }
    static std::string lib() { return (root() / "lib").string(); }
    static std::string data(const std::string& rel) { return (fs::path(LSPKIT_DATA_DIR) / rel).string(); }

    static fs::path write_problem(const std::string& name, nlohmann::json j) {
        const fs::path f = root() / (name + ".json");
        write_json(f, j);
        return f;
    }
};

} // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("fly").code, 2);
    EXPECT_EQ(run("train fly --library " + (root() / "x").string()).code, 2);
    EXPECT_EQ(run("plan --pop 3 --problem " + data("problems/npm.json")).code, 2);
}

TEST_F(Cli, TrainPivotEchoesConfig) {
    const fs::path dir = root() / "trained";
    const Result r = run("train pivot --seed 4 --library " + dir.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("pivot: iterations"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "pivot.tt"));
    const auto m = read_json(dir / "library.json");
    EXPECT_EQ(m["config"]["seed"], 4);
    EXPECT_LE(m["skills"]["pivot"]["residual"].get<double>(), 5e-3);
}

TEST_F(Cli, PlanThenVerify) {
    const fs::path out = root() / "npm.solutions.json";
    const Result r = run("plan --problem " + data("problems/npm.json") + " --library " + lib() +
                      " --pop 300 --cem-iters 60 --seed 2 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = read_json(out);
    EXPECT_EQ(j["config"]["cem"]["population"], 300);
    EXPECT_EQ(j["config"]["seed"], 2);
    ASSERT_FALSE(j["solutions"].empty());
    const Result v = run("verify " + out.string() + " --problem " + data("problems/npm.json") + " --library " + lib());
    EXPECT_EQ(v.code, 0) << v.out;
    EXPECT_NE(v.out.find("subgoal error"), std::string::npos);
}

TEST_F(Cli, TargetAtStartGivesEmptySkeleton) {
    auto j = read_json(data("problems/npm.json"));
    j["target"] = j["x0"];
    const fs::path prob = write_problem("same", j);
    const fs::path out = root() / "same.solutions.json";
    ASSERT_EQ(run("plan --problem " + prob.string() + " --library " + lib() + " --out " + out.string()).code, 0);
    const auto s = read_json(out)["solutions"];
    ASSERT_EQ(s.size(), 1u);
    EXPECT_TRUE(s[0]["skeleton"].empty());
    EXPECT_EQ(run("verify " + out.string() + " --problem " + prob.string() + " --library " + lib()).code, 0);
}

TEST_F(Cli, UnreachableRollExitsOne) {
    auto d = read_json(default_domain_path("npm"));
    auto& ops = d["operators"];
    for (auto it = ops.begin(); it != ops.end();) {
        it = it->at("name") == "pivot" ? ops.erase(it) : it + 1;
    }
    write_json(root() / "npm_nopivot.json", d);
    auto j = read_json(data("problems/npm.json"));
    j["domain"] = "npm_nopivot.json";
    const fs::path prob = write_problem("nopivot", j);
    const fs::path out = root() / "nopivot.solutions.json";
    const Result r = run("plan --problem " + prob.string() + " --library " + lib() + " --iters 10 --pop 100 --out " +
                      out.string());
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("best infeasible J"), std::string::npos);
    const auto s = read_json(out);
    EXPECT_TRUE(s["solutions"].empty());
    EXPECT_TRUE(s["diagnostics"]["best_infeasible_score"].is_number());
}

TEST_F(Cli, TamperedSwitchDomainNamed) {
    const fs::path out = root() / "tamper.solutions.json";
    ASSERT_EQ(run("plan --problem " + data("problems/npm.json") + " --library " + lib() +
                  " --pop 300 --cem-iters 60 --out " + out.string())
                  .code,
              0);
    auto sol = read_json(out)["solutions"][0];
    for (auto& g : sol["subgoals"]) {
        g[kObjYaw] = 0.3;
    }
    const fs::path bad = root() / "tampered.json";
    write_json(bad, sol);
    const Result v = run("verify " + bad.string() + " --problem " + data("problems/npm.json") + " --library " + lib());
    EXPECT_EQ(v.code, 1);
    EXPECT_NE(v.out.find("violation: pivot.entry.obj_yaw"), std::string::npos) << v.out;
}

TEST_F(Cli, MissingLibraryListsSkills) {
    const fs::path empty = root() / "empty_lib";
    fs::create_directories(empty);
    const Result p = run("plan --problem " + data("problems/npm.json") + " --library " + empty.string() + " --out " +
                      (root() / "none.json").string());
    EXPECT_EQ(p.code, 1);
    EXPECT_NE(p.out.find("pivot"), std::string::npos);
    EXPECT_NE(p.out.find("push"), std::string::npos);
    const Result b = run("bench --suite " + data("suites/cem_vs_shooting.json") + " --library " + empty.string() +
                      " --out " + (root() / "b0").string());
    EXPECT_EQ(b.code, 1);
    EXPECT_NE(b.out.find("pull"), std::string::npos);
}

TEST_F(Cli, BenchWritesReports) {
    const fs::path e = root() / "bench_empty";
    ASSERT_EQ(run("bench --suite " + data("suites/empty.json") + " --out " + e.string()).code, 0);
    const auto agg = read_json(e / "aggregate.json");
    EXPECT_TRUE(agg["aggregates"].empty());

    const fs::path o = root() / "bench_small";
    const Result r = run("bench --suite " + data("suites/cem_vs_shooting.json") + " --library " + lib() +
                      " --pop 100 --cem-iters 20 --out " + o.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto a = read_json(o / "aggregate.json");
    EXPECT_EQ(a["aggregates"]["npm/cem"]["count"], 10);
    EXPECT_EQ(a["aggregates"]["npm/shooting"]["count"], 10);
    EXPECT_EQ(a["suite"]["cem"]["population"], 100);
    EXPECT_TRUE(fs::exists(o / "records.csv"));
}
