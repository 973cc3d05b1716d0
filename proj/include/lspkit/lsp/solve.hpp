#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/cem/cem.hpp"
#include "lspkit/lsp/objective.hpp"
#include "lspkit/lsp/verify.hpp"
#include "lspkit/symbolic/mcts.hpp"

namespace lspkit {

struct LspConfig {
    std::size_t iterations = 100;  // H~
    std::size_t max_solutions = 5; // N~_s
    double exploration = 3.0;      // C_E
    std::size_t max_len = 6;
    CemConfig cem;
    std::uint64_t seed = 0;

    void validate() const {
        if (iterations < 1 || max_solutions < 1 || max_len < 1) {
            throw ConfigError("lsp: iterations, max_solutions and max_len must be >= 1");
        }
        if (!(exploration >= 0.0)) {
            throw ConfigError("lsp: exploration must be >= 0");
        }
        cem.validate();
    }
};

inline nlohmann::json cem_config_json(const CemConfig& c) {
    return {{"population", c.population}, {"elite_fraction", c.elite_fraction}, {"max_iters", c.max_iters},
            {"early_stop", c.early_stop}, {"patience", c.patience}, {"seed", c.seed},
            {"max_retries", c.max_retries}};
}

inline nlohmann::json lsp_config_json(const LspConfig& c) {
    return {{"iterations", c.iterations}, {"max_solutions", c.max_solutions}, {"exploration", c.exploration},
            {"max_len", c.max_len},       {"cem", cem_config_json(c.cem)},       {"seed", c.seed}};
}

struct Solution {
    std::vector<std::size_t> skeleton;
    std::vector<LongHorizonState> subgoals;
    double score = 0.0;
    std::vector<double> values;
    std::vector<double> normalized;
    double normalized_reward = 0.0;
    bool solved = false;
    VerifyResult verify;
};

struct SolutionSet {
    std::vector<Solution> solutions;
    std::size_t iterations = 0;
    std::size_t optimized = 0; // proposals that reached CEM
    std::size_t tree_size = 0;
    double best_infeasible_score = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_infeasible_skeleton;
};

/// Per-step V mapped affinely to [0,1] with the skill's grid min/max.
inline std::vector<double> normalized_values(const SkeletonObjective& obj, const std::vector<double>& values) {
    std::vector<double> out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const ValueFunction& v = obj.steps()[k].skill->value;
        const double span = v.vmax - v.vmin;
        out.push_back(span > 0.0 ? clamp((values[k] - v.vmin) / span, 0.0, 1.0) : 1.0);
    }
    return out;
}

inline double normalized_cumulative_reward(const Problem& problem, const SkillLibrary& library,
                                           const std::vector<std::size_t>& skeleton,
                                           const std::vector<LongHorizonState>& subgoals) {
    const SkeletonObjective obj(problem, library, skeleton);
    double s = 0.0;
    for (double v : normalized_values(obj, obj.terms(subgoals).values)) {
        s += v;
    }
    return s;
}

/// Scores, normalizes and verifies fixed subgoals of a skeleton.
inline Solution make_solution(const Problem& problem, const SkillLibrary& library, const SkeletonObjective& obj,
                              std::vector<LongHorizonState> subgoals) {
    Solution s;
    s.skeleton = obj.skeleton();
    s.subgoals = std::move(subgoals);
    const ObjectiveTerms t = obj.terms(s.subgoals);
    s.score = t.total();
    s.values = t.values;
    s.normalized = normalized_values(obj, t.values);
    for (double v : s.normalized) {
        s.normalized_reward += v;
    }
    s.verify = verify_solution(problem, library, s.skeleton, s.subgoals);
    s.solved = s.verify.solved;
    return s;
}

/// Every dim where x0 and the target differ beyond the thresholds is driven
/// by some operator of the skeleton.
inline bool skeleton_covers_target(const Problem& p, const std::vector<std::size_t>& skeleton) {
    const Eigen::VectorXd d = lh_difference(p.x0, p.target);
    for (std::size_t k = 0; k < p.x0.size(); ++k) {
        const double tol = lh_is_angle(k) ? p.orientation_threshold : p.position_threshold;
        if (std::abs(d(static_cast<Eigen::Index>(k))) < tol) {
            continue;
        }
        const bool hit = std::any_of(skeleton.begin(), skeleton.end(), [&](std::size_t op) {
            return p.domain.operators[op].actuates(lh_names()[k]);
        });
        if (!hit) {
            return false;
        }
    }
    return true;
}

inline void check_library(const Problem& problem, const SkillLibrary& library) {
    std::set<std::string> missing;
    for (const auto& op : problem.domain.operators) {
        if (!library.has(op.skill)) {
            missing.insert(op.skill);
        }
    }
    if (!missing.empty()) {
        std::string m;
        for (const auto& s : missing) {
            m += (m.empty() ? "" : ", ") + s;
        }
        throw LibraryError("skill library lacks value functions for: " + m);
    }
}

/// MCTS proposes skeletons, CEM-MD optimizes their subgoals, rollouts verify
/// and the binary outcome is backpropagated.
inline SolutionSet lsp_solve(const Problem& problem, const SkillLibrary& library, const LspConfig& cfg) {
    cfg.validate();
    problem.validate();
    check_library(problem, library);
    SolutionSet out;
    if (problem.reached(problem.x0)) {
        SkeletonObjective obj(problem, library, {});
        out.solutions.push_back(make_solution(problem, library, obj, {}));
        return out;
    }
    MctsOptions mo;
    mo.exploration = cfg.exploration;
    mo.max_len = cfg.max_len;
    mo.seed = derive_seed(cfg.seed, 0x4c5350);
    mo.reached = [&](const SymbolicState&, const std::vector<std::size_t>& sk) {
        return skeleton_covers_target(problem, sk);
    };
    SkeletonTree tree(problem.domain, problem.s0, mo);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        out.iterations = it + 1;
        const SkeletonProposal prop = tree.propose();
        if (!prop.ok) {
            break;
        }
        double reward = 0.0;
        {
            const SkeletonObjective obj(problem, library, prop.skeleton);
            CemConfig cc = cfg.cem;
            cc.seed = derive_seed(cfg.seed, 0x10000 + it);
            const CemResult res = cem_optimize(std::cref(obj), obj.spec(), cc);
            ++out.optimized;
            Solution s = make_solution(problem, library, obj, obj.decode(res.best));
            if (s.solved) {
                reward = 1.0;
                const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const Solution& o) {
                    return o.skeleton == s.skeleton && o.subgoals == s.subgoals;
                });
                if (!dup) {
                    out.solutions.push_back(std::move(s));
                }
            } else if (s.score > out.best_infeasible_score) {
                out.best_infeasible_score = s.score;
                out.best_infeasible_skeleton = s.skeleton;
            }
        }
        tree.backprop(prop, reward);
        if (out.solutions.size() >= cfg.max_solutions) {
            break;
        }
    }
    out.tree_size = tree.size();
    return out;
}

inline nlohmann::json solution_json(const Problem& problem, const Solution& s) {
    nlohmann::json j;
    j["skeleton"] = problem.domain.skeleton_names(s.skeleton);
    j["subgoals"] = nlohmann::json::array();
    for (const auto& g : s.subgoals) {
        j["subgoals"].push_back(std_vector(g.v));
    }
    j["score"] = s.score;
    j["values"] = s.values;
    j["normalized"] = s.normalized;
    j["normalized_reward"] = s.normalized_reward;
    j["solved"] = s.solved;
    j["achieved"] = std_vector(s.verify.achieved.v);
    j["rollouts"] = nlohmann::json::array();
    for (const auto& r : s.verify.steps) {
        j["rollouts"].push_back({{"op", r.op},
                                 {"skill", r.skill},
                                 {"success", r.skill_success},
                                 {"steps", r.steps},
                                 {"cumulative_reward", r.cumulative_reward},
                                 {"subgoal_error", {{"position", r.subgoal_error.position},
                                                    {"orientation", r.subgoal_error.orientation}}}});
    }
    return j;
}

inline nlohmann::json solution_set_json(const Problem& problem, const SolutionSet& set, const LspConfig& cfg) {
    nlohmann::json j;
    j["problem"] = problem.name;
    j["seed"] = cfg.seed;
    j["config"] = lsp_config_json(cfg);
    j["iterations"] = set.iterations;
    j["solutions"] = nlohmann::json::array();
    for (const auto& s : set.solutions) {
        j["solutions"].push_back(solution_json(problem, s));
    }
    nlohmann::json d;
    d["optimized"] = set.optimized;
    d["tree_size"] = set.tree_size;
    if (set.best_infeasible_skeleton.empty()) {
        d["best_infeasible_score"] = nullptr;
    } else {
        d["best_infeasible_score"] = set.best_infeasible_score;
        d["best_infeasible_skeleton"] = problem.domain.skeleton_names(set.best_infeasible_skeleton);
    }
    j["diagnostics"] = d;
    return j;
}

/// Skeleton and subgoals of one stored solution.
struct StoredSolution {
    std::vector<std::size_t> skeleton;
    std::vector<LongHorizonState> subgoals;
};

inline StoredSolution parse_solution(const Problem& problem, const nlohmann::json& j) {
    StoredSolution s;
    try {
        s.skeleton = problem.domain.skeleton_from_names(j.at("skeleton").get<std::vector<std::string>>());
        for (const auto& g : j.at("subgoals")) {
            s.subgoals.emplace_back(json_vector(g));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("solution: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("solution: ") + e.what());
    }
    return s;
}

/// A solution-set file lists "solutions"; a bare solution object is one entry.
inline std::vector<StoredSolution> parse_solutions(const Problem& problem, const nlohmann::json& j) {
    std::vector<StoredSolution> out;
    if (j.is_object() && j.contains("solutions")) {
        if (!j["solutions"].is_array()) {
            throw ParseError("solution file: 'solutions' must be an array");
        }
        for (const auto& s : j["solutions"]) {
            out.push_back(parse_solution(problem, s));
        }
    } else {
        out.push_back(parse_solution(problem, j));
    }
    return out;
}

} // namespace lspkit
