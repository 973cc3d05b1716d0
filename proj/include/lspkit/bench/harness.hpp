#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/bench/instances.hpp"
#include "lspkit/bench/shooting.hpp"
#include "lspkit/bench/stap.hpp"
#include "lspkit/bench/ttgo.hpp"
#include "lspkit/lsp/solve.hpp"

namespace lspkit {

struct BenchSuite {
    std::string name = "suite";
    std::string domain = "npm";
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;
    /// Optimizer methods share this skeleton; planners search their own.
    std::vector<std::string> skeleton = {"push_wall", "pivot", "pull_center"};
    CemConfig cem;
    std::size_t shooting_samples = 1000;
    TtgoConfig ttgo;
    LspConfig lsp;
};

struct BenchRecord {
    std::string domain;
    std::uint64_t seed = 0;
    std::string method;
    double error = 0.0;
    double score = 0.0;
    double normalized_reward = 0.0;
    std::size_t length = 0;
    bool solved = false;
    double time = 0.0;
    double approx_time = 0.0;
    double infer_time = 0.0;
};

struct BenchAggregate {
    std::size_t count = 0;
    double error_mean = 0.0, error_std = 0.0;
    double score_mean = 0.0, score_std = 0.0;
    double reward_mean = 0.0, reward_std = 0.0;
    double length_mean = 0.0, length_std = 0.0;
    double solved_rate = 0.0;
};

struct BenchReport {
    std::vector<BenchRecord> records;
    std::map<std::string, BenchAggregate> aggregates; // "domain/method"
};

inline const std::vector<std::string>& optimizer_methods() {
    static const std::vector<std::string> m = {"cem", "shooting", "ttgo"};
    return m;
}

inline const std::vector<std::string>& planner_methods() {
    static const std::vector<std::string> m = {"lsp", "stap"};
    return m;
}

namespace detail {

inline void read_cem(const nlohmann::json& j, CemConfig& c) {
    c.population = j.value("population", c.population);
    c.elite_fraction = j.value("elite_fraction", c.elite_fraction);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.early_stop = j.value("early_stop", c.early_stop);
    c.patience = j.value("patience", c.patience);
}

/// Population mean and standard deviation.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) {
        return {0.0, 0.0};
    }
    double m = 0.0;
    for (double x : v) {
        m += x;
    }
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

} // namespace detail

/// Suite file: {"name", "domain", "seeds": [..] or "instances" + "seed",
/// "methods", "skeleton", "cem", "shooting": {"samples"}, "ttgo", "lsp"}.
inline BenchSuite parse_suite(const nlohmann::json& j, const std::string& source = "suite") {
    BenchSuite s;
    try {
        s.name = j.value("name", s.name);
        s.domain = j.value("domain", s.domain);
        if (j.contains("seeds")) {
            s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        } else {
            const std::size_t n = j.value("instances", std::size_t{0});
            const std::uint64_t base = j.value("seed", std::uint64_t{0});
            for (std::size_t i = 0; i < n; ++i) {
                s.seeds.push_back(base + i);
            }
        }
        s.methods = j.value("methods", s.methods);
        s.skeleton = j.value("skeleton", s.skeleton);
        if (j.contains("cem")) {
            detail::read_cem(j["cem"], s.cem);
        }
        if (j.contains("shooting")) {
            s.shooting_samples = j["shooting"].value("samples", s.shooting_samples);
        }
        if (j.contains("ttgo")) {
            const auto& t = j["ttgo"];
            s.ttgo.resolution = t.value("resolution", s.ttgo.resolution);
            s.ttgo.eps = t.value("eps", s.ttgo.eps);
            s.ttgo.max_rank = t.value("max_rank", s.ttgo.max_rank);
            s.ttgo.candidates = t.value("candidates", s.ttgo.candidates);
        }
        if (j.contains("lsp")) {
            const auto& l = j["lsp"];
            s.lsp.iterations = l.value("iterations", s.lsp.iterations);
            s.lsp.max_solutions = l.value("max_solutions", s.lsp.max_solutions);
            s.lsp.exploration = l.value("exploration", s.lsp.exploration);
            s.lsp.max_len = l.value("max_len", s.lsp.max_len);
            if (l.contains("cem")) {
                detail::read_cem(l["cem"], s.lsp.cem);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
    for (const auto& m : s.methods) {
        const bool known = std::count(optimizer_methods().begin(), optimizer_methods().end(), m) +
                           std::count(planner_methods().begin(), planner_methods().end(), m);
        if (!known) {
            throw ParseError(source + ": unknown method '" + m + "'");
        }
    }
    return s;
}

inline nlohmann::json suite_json(const BenchSuite& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["domain"] = s.domain;
    j["seeds"] = s.seeds;
    j["methods"] = s.methods;
    j["skeleton"] = s.skeleton;
    j["cem"] = cem_config_json(s.cem);
    j["shooting"] = {{"samples", s.shooting_samples}};
    j["ttgo"] = {{"resolution", s.ttgo.resolution},
                 {"eps", s.ttgo.eps},
                 {"max_rank", s.ttgo.max_rank},
                 {"candidates", s.ttgo.candidates}};
    j["lsp"] = lsp_config_json(s.lsp);
    return j;
}

/// Distance of the last planned subgoal from the target.
inline double plan_error(const Problem& p, const std::vector<LongHorizonState>& subgoals) {
    return lh_distance(subgoals.empty() ? p.x0 : subgoals.back(), p.target);
}

namespace detail {

inline void fill_from_solution(BenchRecord& r, const Problem& p, const Solution& s) {
    r.error = plan_error(p, s.subgoals);
    r.score = s.score;
    r.normalized_reward = s.normalized_reward;
    r.length = s.skeleton.size();
    r.solved = s.solved;
}

} // namespace detail

/// One instance, one method. Every method sees the same objective and the
/// instance's seed.
inline BenchRecord run_method(const BenchSuite& suite, const Problem& p, const SkillLibrary& library,
                              const std::string& method, std::uint64_t seed) {
    BenchRecord r;
    r.domain = suite.domain;
    r.seed = seed;
    r.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    if (std::count(optimizer_methods().begin(), optimizer_methods().end(), method)) {
        const auto sk = p.domain.skeleton_from_names(suite.skeleton);
        const SkeletonObjective obj(p, library, sk);
        MixedSample best;
        if (method == "cem") {
            CemConfig c = suite.cem;
            c.seed = seed;
            best = cem_optimize(std::cref(obj), obj.spec(), c).best;
        } else if (method == "shooting") {
            best = random_shooting(std::cref(obj), obj.spec(), suite.shooting_samples, seed).best;
        } else {
            TtgoConfig c = suite.ttgo;
            c.seed = seed;
            const TtgoResult t = ttgo_optimize(std::cref(obj), obj.spec(), c);
            best = t.best;
            r.approx_time = t.approx_time;
            r.infer_time = t.infer_time;
        }
        detail::fill_from_solution(r, p, make_solution(p, library, obj, obj.decode(best)));
    } else if (method == "lsp") {
        LspConfig c = suite.lsp;
        c.seed = seed;
        const SolutionSet set = lsp_solve(p, library, c);
        const Solution* best = nullptr;
        for (const auto& s : set.solutions) {
            if (!best || s.score > best->score) {
                best = &s;
            }
        }
        if (best) {
            detail::fill_from_solution(r, p, *best);
        } else {
            r.error = lh_distance(p.x0, p.target);
        }
    } else {
        LspConfig c = suite.lsp;
        c.seed = seed;
        const StapResult s = stap_baseline(p, library, c);
        if (s.found) {
            detail::fill_from_solution(r, p, s.solution);
        } else {
            r.error = lh_distance(p.x0, p.target);
        }
    }
    r.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::map<std::string, BenchAggregate> aggregate(const std::vector<BenchRecord>& records) {
    std::map<std::string, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        groups[r.domain + "/" + r.method].push_back(&r);
    }
    std::map<std::string, BenchAggregate> out;
    for (const auto& [key, rs] : groups) {
        std::vector<double> e, s, w, l;
        double solved = 0.0;
        for (const auto* r : rs) {
            e.push_back(r->error);
            s.push_back(r->score);
            w.push_back(r->normalized_reward);
            l.push_back(static_cast<double>(r->length));
            solved += r->solved ? 1.0 : 0.0;
        }
        BenchAggregate a;
        a.count = rs.size();
        std::tie(a.error_mean, a.error_std) = detail::mean_std(e);
        std::tie(a.score_mean, a.score_std) = detail::mean_std(s);
        std::tie(a.reward_mean, a.reward_std) = detail::mean_std(w);
        std::tie(a.length_mean, a.length_std) = detail::mean_std(l);
        a.solved_rate = solved / static_cast<double>(rs.size());
        out[key] = a;
    }
    return out;
}

inline BenchReport run_benchmarks(const BenchSuite& suite, const SkillLibrary& library,
                                  const std::function<void(const BenchRecord&)>& on_record = {}) {
    BenchReport rep;
    if (suite.seeds.empty() || suite.methods.empty()) {
        return rep;
    }
    const TaskDomain domain = load_task_domain(default_domain_path(suite.domain));
    for (std::uint64_t seed : suite.seeds) {
        const Problem p = make_instance(domain, seed);
        check_library(p, library);
        for (const auto& m : suite.methods) {
            rep.records.push_back(run_method(suite, p, library, m, seed));
            if (on_record) {
                on_record(rep.records.back());
            }
        }
    }
    rep.aggregates = aggregate(rep.records);
    return rep;
}

/// Deterministic outputs (records.csv, aggregate.json) and wall-clock
/// timings (timings.csv) go to separate files.
inline void write_report(const std::filesystem::path& dir, const BenchSuite& suite, const BenchReport& rep,
                         const nlohmann::json& config = {}) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "records.csv", std::ios::binary);
        f << "domain,seed,method,error,score,normalized_reward,length,solved\n";
        for (const auto& r : rep.records) {
            f << r.domain << ',' << r.seed << ',' << r.method << ',' << detail::num(r.error) << ','
              << detail::num(r.score) << ',' << detail::num(r.normalized_reward) << ',' << r.length << ','
              << (r.solved ? 1 : 0) << '\n';
        }
    }
    {
        std::ofstream f(dir / "timings.csv", std::ios::binary);
        f << "domain,seed,method,time,approx_time,infer_time\n";
        for (const auto& r : rep.records) {
            f << r.domain << ',' << r.seed << ',' << r.method << ',' << detail::num(r.time) << ','
              << detail::num(r.approx_time) << ',' << detail::num(r.infer_time) << '\n';
        }
    }
    nlohmann::json j;
    j["suite"] = suite_json(suite);
    if (!config.is_null()) {
        j["config"] = config;
    }
    j["aggregates"] = nlohmann::json::object();
    for (const auto& [k, a] : rep.aggregates) {
        j["aggregates"][k] = {{"count", a.count},
                              {"error", {{"mean", a.error_mean}, {"std", a.error_std}}},
                              {"score", {{"mean", a.score_mean}, {"std", a.score_std}}},
                              {"normalized_reward", {{"mean", a.reward_mean}, {"std", a.reward_std}}},
                              {"length", {{"mean", a.length_mean}, {"std", a.length_std}}},
                              {"solved_rate", a.solved_rate}};
    }
    write_json(dir / "aggregate.json", j);
}

} // namespace lspkit
