#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lspkit/bench/harness.hpp"
#include "lspkit/lsp/solve.hpp"
#include "lspkit/lsp/verify.hpp"

namespace fs = std::filesystem;
using namespace lspkit;

namespace {

// Flags that may also come from --config; flags win.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> eps;
    std::optional<std::size_t> max_rank;
    std::optional<std::size_t> pop;
    std::optional<double> elite;
    std::optional<std::size_t> iters;
    std::optional<std::size_t> cem_iters;
    std::optional<std::size_t> max_solutions;
    std::optional<double> explore;
};

struct Cli {
    std::string config;
    std::string domain;
    std::string library;
    std::string problem;
    std::string suite;
    std::string out;
    std::string skill;
    std::string solution;
    bool verbose = false;
    Overrides ov;
};

template <class T>
void fill(std::optional<T>& v, const nlohmann::json& j, const char* key) {
    if (!v && j.contains(key)) {
        v = j.at(key).get<T>();
    }
}

void fill(std::string& v, const nlohmann::json& j, const char* key) {
    if (v.empty() && j.contains(key)) {
        v = j.at(key).get<std::string>();
    }
}

void apply_config_file(Cli& c) {
    if (c.config.empty()) {
        return;
    }
    const nlohmann::json j = read_json(c.config);
    try {
        fill(c.domain, j, "domain");
        fill(c.library, j, "library");
        fill(c.out, j, "out");
        fill(c.ov.seed, j, "seed");
        fill(c.ov.eps, j, "eps");
        fill(c.ov.max_rank, j, "max_rank");
        fill(c.ov.pop, j, "pop");
        fill(c.ov.elite, j, "elite");
        fill(c.ov.iters, j, "iters");
        fill(c.ov.cem_iters, j, "cem_iters");
        fill(c.ov.max_solutions, j, "max_solutions");
        fill(c.ov.explore, j, "explore");
        if (!c.verbose) {
            c.verbose = j.value("verbose", false);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(c.config + ": " + e.what());
    }
}

DomainParams params_for(const Cli& c) {
    return load_domain_params(c.domain.empty() ? default_params_path() : fs::path(c.domain));
}

void apply_cem(const Overrides& o, CemConfig& cem) {
    if (o.pop) {
        cem.population = *o.pop;
    }
    if (o.elite) {
        cem.elite_fraction = *o.elite;
    }
    if (o.cem_iters) {
        cem.max_iters = *o.cem_iters;
    }
    cem.validate();
}

void apply_lsp(const Overrides& o, LspConfig& lsp) {
    if (o.seed) {
        lsp.seed = *o.seed;
    }
    if (o.iters) {
        lsp.iterations = *o.iters;
    }
    if (o.max_solutions) {
        lsp.max_solutions = *o.max_solutions;
    }
    if (o.explore) {
        lsp.exploration = *o.explore;
    }
    apply_cem(o, lsp.cem);
    lsp.validate();
}

// Loads whichever of the domain's skills exist so a missing-skill error can
// list all of them at once.
SkillLibrary load_available(const fs::path& dir, const DomainParams& params, const TaskDomain& domain) {
    SkillLibrary lib(params);
    std::set<std::string> wanted;
    for (const auto& op : domain.operators) {
        wanted.insert(op.skill);
    }
    for (const auto& s : wanted) {
        if (fs::exists(value_file(dir, s))) {
            lib.add(load_value_function(dir, s));
        }
    }
    return lib;
}

fs::path library_dir(const Cli& c, const Problem* p) {
    if (!c.library.empty()) {
        return c.library;
    }
    if (p && !p->library_dir.empty()) {
        return p->library_dir;
    }
    return "library";
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int cmd_train(const Cli& c) {
    DomainParams params = params_for(c);
    std::vector<std::string> names;
    if (c.skill == "all") {
        names = params.skill_names();
    } else if (params.skills.count(c.skill)) {
        names = {c.skill};
    } else {
        std::cerr << "unknown skill '" << c.skill << "'\n";
        return 2;
    }
    const std::uint64_t seed = c.ov.seed.value_or(0);
    const fs::path dir = c.library.empty() ? fs::path(c.out.empty() ? "library" : c.out) : fs::path(c.library);
    nlohmann::json manifest;
    manifest["config"] = {{"domain", c.domain.empty() ? default_params_path().string() : c.domain},
                          {"library", dir.string()},
                          {"seed", seed},
                          {"skills", names}};
    manifest["skills"] = nlohmann::json::object();
    bool all_converged = true;
    for (const auto& name : names) {
        SkillConfig& cfg = params.skills.at(name);
        if (c.ov.eps) {
            cfg.eps = *c.ov.eps;
        }
        if (c.ov.max_rank) {
            cfg.max_rank = *c.ov.max_rank;
        }
        if (c.ov.iters) {
            cfg.max_iters = *c.ov.iters;
        }
        TrainProgress progress;
        if (c.verbose) {
            progress = [](const std::string& s, std::size_t it, double dv, std::size_t r) {
                std::cerr << s << " it " << it << " dV " << fmt(dv) << " rank " << r << '\n';
            };
        }
        const auto t0 = std::chrono::steady_clock::now();
        const ValueFunction vf = train_skill(cfg, params, seed, progress);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        save_value_function(dir, vf);
        std::cout << name << ": iterations " << vf.iterations << " residual " << fmt(vf.residual) << " time "
                  << fmt(wall) << "s" << (vf.converged ? "" : " NOT CONVERGED") << '\n';
        manifest["skills"][name] = {{"config", vf.config},
                                    {"iterations", vf.iterations},
                                    {"residual", vf.residual},
                                    {"converged", vf.converged},
                                    {"ranks", vf.tt.ranks()}};
        all_converged = all_converged && vf.converged;
    }
    manifest["converged"] = all_converged;
    write_json(dir / "library.json", manifest);
    return all_converged ? 0 : 1;
}

int cmd_plan(const Cli& c) {
    if (c.problem.empty()) {
        std::cerr << "plan: --problem is required\n";
        return 2;
    }
    const Problem p = load_problem(c.problem);
    LspConfig cfg;
    apply_lsp(c.ov, cfg);
    const fs::path dir = library_dir(c, &p);
    const SkillLibrary lib = load_available(dir, params_for(c), p.domain);
    const SolutionSet set = lsp_solve(p, lib, cfg);
    nlohmann::json j = solution_set_json(p, set, cfg);
    j["config"]["problem"] = c.problem;
    j["config"]["library"] = dir.string();
    j["config"]["domain"] = c.domain.empty() ? default_params_path().string() : c.domain;
    const fs::path out = c.out.empty() ? fs::path("solutions.json") : fs::path(c.out);
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    write_json(out, j);
    for (const auto& s : set.solutions) {
        const auto names = p.domain.skeleton_names(s.skeleton);
        std::string sk;
        for (const auto& n : names) {
            sk += (sk.empty() ? "" : " ") + n;
        }
        std::cout << "[" << sk << "] score " << fmt(s.score) << " normalized reward " << fmt(s.normalized_reward)
                  << '\n';
    }
    if (set.solutions.empty()) {
        std::cout << "no solution after " << set.iterations << " iterations";
        if (!set.best_infeasible_skeleton.empty()) {
            std::cout << "; best infeasible J " << fmt(set.best_infeasible_score);
        }
        std::cout << '\n';
        return 1;
    }
    return 0;
}

int cmd_verify(const Cli& c) {
    if (c.solution.empty() || c.problem.empty()) {
        std::cerr << "verify: need a solution file and a problem file\n";
        return 2;
    }
    const Problem p = load_problem(c.problem);
    const auto sols = parse_solutions(p, read_json(c.solution));
    const SkillLibrary lib = load_available(library_dir(c, &p), params_for(c), p.domain);
    check_library(p, lib);
    bool all = !sols.empty();
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const VerifyResult r = verify_solution(p, lib, sols[i].skeleton, sols[i].subgoals);
        std::cout << "solution " << i << ":\n";
        for (const auto& s : r.steps) {
            std::cout << "  " << s.op << " (" << s.skill << ") subgoal error position "
                      << fmt(s.subgoal_error.position) << " orientation " << fmt(s.subgoal_error.orientation)
                      << (s.skill_success ? "" : " skill failed") << '\n';
        }
        for (const auto& v : r.violations) {
            std::cout << "  violation: " << v << '\n';
        }
        std::cout << "  final error position " << fmt(r.final_error.position) << " orientation "
                  << fmt(r.final_error.orientation) << "\n  solved " << (r.solved ? "true" : "false") << '\n';
        all = all && r.solved;
    }
    return all ? 0 : 1;
}

int cmd_bench(const Cli& c) {
    if (c.suite.empty()) {
        std::cerr << "bench: --suite is required\n";
        return 2;
    }
    nlohmann::json sj = read_json(c.suite);
    if (c.ov.seed && !sj.contains("seeds")) {
        sj["seed"] = *c.ov.seed;
    }
    BenchSuite suite = parse_suite(sj, c.suite);
    apply_cem(c.ov, suite.cem);
    apply_lsp(c.ov, suite.lsp);
    const fs::path dir = library_dir(c, nullptr);
    const DomainParams params = params_for(c);
    SkillLibrary lib(params);
    if (!suite.seeds.empty() && !suite.methods.empty()) {
        lib = load_available(dir, params, load_task_domain(default_domain_path(suite.domain)));
    }
    auto progress = [&](const BenchRecord& r) {
        if (c.verbose) {
            std::cerr << r.domain << " seed " << r.seed << " " << r.method << " error " << fmt(r.error) << " time "
                      << fmt(r.time) << "s\n";
        }
    };
    const BenchReport rep = run_benchmarks(suite, lib, progress);
    const fs::path out = c.out.empty() ? fs::path("bench") : fs::path(c.out);
    write_report(out, suite, rep,
                 {{"suite_file", c.suite},
                  {"library", dir.string()},
                  {"domain", c.domain.empty() ? default_params_path().string() : c.domain}});
    for (const auto& [k, a] : rep.aggregates) {
        std::cout << k << ": n " << a.count << " error " << fmt(a.error_mean) << " +- " << fmt(a.error_std)
                  << " normalized reward " << fmt(a.reward_mean) << " solved " << fmt(a.solved_rate) << '\n';
    }
    std::cout << rep.records.size() << " records written to " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logic-skill planning toolkit"};
    app.require_subcommand(1);
    Cli c;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", c.config, "JSON file with default flag values");
        s->add_option("--domain", c.domain, "skill parameter file");
        s->add_option("--library", c.library, "library directory");
        s->add_option("--out", c.out, "output file or directory");
        s->add_option("--seed", c.ov.seed);
        s->add_flag("--verbose", c.verbose);
    };
    auto planning = [&](CLI::App* s) {
        s->add_option("--pop", c.ov.pop, "CEM population")->check(CLI::Range(10, 1000000));
        s->add_option("--elite", c.ov.elite, "CEM elite fraction")->check(CLI::Range(0.0, 1.0));
        s->add_option("--cem-iters", c.ov.cem_iters, "CEM iteration cap")->check(CLI::PositiveNumber);
        s->add_option("--iters", c.ov.iters, "MCTS iterations")->check(CLI::PositiveNumber);
        s->add_option("--max-solutions", c.ov.max_solutions)->check(CLI::PositiveNumber);
        s->add_option("--explore", c.ov.explore, "UCB exploration constant")->check(CLI::NonNegativeNumber);
    };

    auto* train = app.add_subcommand("train", "train value functions");
    common(train);
    train->add_option("skill", c.skill, "skill name or 'all'")->required();
    train->add_option("--eps", c.ov.eps)->check(CLI::PositiveNumber);
    train->add_option("--max-rank", c.ov.max_rank)->check(CLI::PositiveNumber);
    train->add_option("--iters", c.ov.iters, "value iteration cap")->check(CLI::PositiveNumber);

    auto* plan = app.add_subcommand("plan", "search skeletons and subgoals");
    common(plan);
    planning(plan);
    plan->add_option("--problem,problem", c.problem)->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "replay a solution file");
    common(verify);
    verify->add_option("solution", c.solution)->check(CLI::ExistingFile)->required();
    verify->add_option("--problem,problem", c.problem)->check(CLI::ExistingFile);

    auto* bench = app.add_subcommand("bench", "run a benchmark suite");
    common(bench);
    planning(bench);
    bench->add_option("--suite,suite", c.suite)->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        apply_config_file(c);
        if (train->parsed()) {
            return cmd_train(c);
        }
        if (plan->parsed()) {
            return cmd_plan(c);
        }
        if (verify->parsed()) {
            return cmd_verify(c);
        }
        return cmd_bench(c);
    } catch (const LibraryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
