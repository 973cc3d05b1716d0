#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lspkit/bench/harness.hpp"
#include "toy_library.hpp"

using namespace lspkit;

namespace {

const SkillLibrary& lib() {
    static const SkillLibrary l = toy::library(load_domain_params(default_params_path()));
    return l;
}

VariableSpec box2() {
    VariableSpec s;
    s.lower = {-1.0, -1.0};
    s.upper = {1.0, 1.0};
    return s;
}

LspConfig small_lsp(std::uint64_t seed) {
    LspConfig c;
    c.iterations = 60;
    c.max_solutions = 2;
    c.cem.population = 300;
    c.cem.max_iters = 60;
    c.seed = seed;
    return c;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
        out.push_back(f);
    }
    return out;
}

} // namespace

TEST(Shooting, SingleSampleIsReturned) {
    int calls = 0;
    MixedSample seen;
    auto f = [&](const MixedSample& s) {
        ++calls;
        seen = s;
        return 1.0 - s.x.squaredNorm();
    };
    const auto r = random_shooting(f, box2(), 1, 5);
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(r.evaluations, 1u);
    EXPECT_TRUE(r.best == seen);
    EXPECT_DOUBLE_EQ(r.score, 1.0 - seen.x.squaredNorm());
}

TEST(Shooting, ExhaustiveDiscreteFindsArgmax) {
    VariableSpec s;
    s.categories = {{0, 1, 2, 3}, {0, 1, 2, 3, 4}, {0, 1, 2}};
    auto f = [](const MixedSample& m) {
        const double a = static_cast<double>(m.k[0]), b = static_cast<double>(m.k[1]), c = static_cast<double>(m.k[2]);
        return std::sin(a * 1.3 + b) * std::cos(c - 0.7 * b) + 0.1 * a;
    };
    double best = -1e300;
    std::vector<std::size_t> arg;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 5; ++b) {
            for (std::size_t c = 0; c < 3; ++c) {
                MixedSample m;
                m.k = {a, b, c};
                if (f(m) > best) {
                    best = f(m);
                    arg = m.k;
                }
            }
        }
    }
    const auto r = random_shooting(f, s, 60, 3, true);
    EXPECT_EQ(r.evaluations, 60u);
    EXPECT_EQ(r.best.k, arg);
    EXPECT_EQ(r.score, best);
    EXPECT_THROW(random_shooting(f, box2(), 4, 0, true), ConfigError);
    EXPECT_THROW(random_shooting(f, s, 0, 0), ConfigError);
}

TEST(Ttgo, QuadraticWithinOneCell) {
    auto f = [](const MixedSample& m) {
        return -(m.x(0) - 0.31) * (m.x(0) - 0.31) - (m.x(1) + 0.22) * (m.x(1) + 0.22);
    };
    TtgoConfig c;
    const auto r = ttgo_optimize(f, box2(), c);
    const double h = 2.0 / static_cast<double>(c.resolution - 1);
    EXPECT_LE(std::abs(r.best.x(0) - 0.31), h);
    EXPECT_LE(std::abs(r.best.x(1) + 0.22), h);
    EXPECT_GE(r.approx_time, 0.0);
    EXPECT_GE(r.infer_time, 0.0);
}

TEST(Ttgo, ConstantReturnsConstant) {
    VariableSpec s = box2();
    s.categories = {{1.0, 2.0, 3.0}};
    const auto r = ttgo_optimize([](const MixedSample&) { return -2.5; }, s, TtgoConfig{});
    EXPECT_EQ(r.score, -2.5);
    ASSERT_EQ(r.best.k.size(), 1u);
    EXPECT_LT(r.best.k[0], 3u);
}

TEST(Instances, SeededAndDistinct) {
    const auto a = make_instance("npm", 4);
    const auto b = make_instance("npm", 4);
    const auto c = make_instance("npm", 5);
    EXPECT_EQ(a.x0, b.x0);
    EXPECT_EQ(a.target, b.target);
    EXPECT_NE(a.x0, c.x0);
    EXPECT_NO_THROW(a.validate());
    EXPECT_FALSE(a.goal.empty());
    EXPECT_NO_THROW(make_instance("pm", 1).validate());
    EXPECT_NO_THROW(make_instance("ppm", 1).validate());
}

TEST(Stap, NpmReachesGoal) {
    const auto p = make_instance("npm", 2);
    const auto r = stap_baseline(p, lib(), small_lsp(1));
    ASSERT_TRUE(r.found);
    EXPECT_TRUE(r.solution.solved);
    const auto end = replay(p.s0, p.domain.operators, r.solution.skeleton);
    EXPECT_TRUE(p.goal.satisfied(end));
}

TEST(Stap, PpmEndsWithPick) {
    const auto p = make_instance("ppm", 3);
    const auto r = stap_baseline(p, lib(), small_lsp(1));
    ASSERT_TRUE(r.found);
    ASSERT_FALSE(r.solution.skeleton.empty());
    const auto& last = p.domain.operators[r.solution.skeleton.back()];
    EXPECT_EQ(last.skill, "pick");
}

TEST(Stap, NeedsGoal) {
    auto p = make_instance("npm", 2);
    p.goal = {};
    EXPECT_THROW(stap_baseline(p, lib(), small_lsp(1)), ConfigError);
}

TEST(Bench, EmptySuiteIsEmptyReport) {
    const auto s = parse_suite(nlohmann::json{{"domain", "npm"}, {"methods", {"cem"}}, {"seeds", nlohmann::json::array()}});
    const auto rep = run_benchmarks(s, lib());
    EXPECT_TRUE(rep.records.empty());
    EXPECT_TRUE(rep.aggregates.empty());
    EXPECT_THROW(parse_suite(nlohmann::json{{"methods", {"annealing"}}}), ParseError);
}

TEST(Bench, RecordCountAndAggregates) {
    nlohmann::json j = {{"name", "t"},
                        {"domain", "npm"},
                        {"instances", 10},
                        {"seed", 0},
                        {"methods", {"cem", "shooting"}},
                        {"cem", {{"population", 100}, {"max_iters", 20}}},
                        {"shooting", {{"samples", 200}}}};
    const auto s = parse_suite(j);
    const auto rep = run_benchmarks(s, lib());
    ASSERT_EQ(rep.records.size(), 20u);
    const auto dir = std::filesystem::temp_directory_path() / "lspkit_bench_test";
    std::filesystem::remove_all(dir);
    write_report(dir, s, rep);

    // recompute mean/std of error per method from the csv
    std::ifstream f(dir / "records.csv");
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "domain,seed,method,error,score,normalized_reward,length,solved");
    std::map<std::string, std::vector<double>> err;
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        const auto c = split(line);
        ASSERT_EQ(c.size(), 8u);
        EXPECT_EQ(c[0], "npm");
        EXPECT_EQ(c[6], "3");
        err[c[2]].push_back(std::stod(c[3]));
        ++rows;
    }
    EXPECT_EQ(rows, 20u);
    const auto agg = read_json(dir / "aggregate.json")["aggregates"];
    for (const auto& [m, v] : err) {
        ASSERT_EQ(v.size(), 10u);
        double mean = 0.0;
        for (double e : v) {
            mean += e;
        }
        mean /= 10.0;
        double var = 0.0;
        for (double e : v) {
            var += (e - mean) * (e - mean);
        }
        const auto& a = agg["npm/" + m];
        EXPECT_EQ(a["count"].get<int>(), 10);
        EXPECT_NEAR(a["error"]["mean"].get<double>(), mean, 1e-8);
        EXPECT_NEAR(a["error"]["std"].get<double>(), std::sqrt(var / 10.0), 1e-8);
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "timings.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Bench, MissingSkillIsLibraryError) {
    SkillLibrary empty(load_domain_params(default_params_path()));
    const auto s = parse_suite(nlohmann::json{{"domain", "npm"}, {"methods", {"cem"}}, {"seeds", {0}}});
    EXPECT_THROW(run_benchmarks(s, empty), LibraryError);
}
