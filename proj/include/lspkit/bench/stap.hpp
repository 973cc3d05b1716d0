#pragma once

#include <limits>
#include <vector>

#include "lspkit/lsp/solve.hpp"

namespace lspkit {

struct StapResult {
    bool found = false;
    Solution solution;
    std::size_t iterations = 0;
    std::size_t optimized = 0;
};

/// Feasibility objective: target term and penalties only, no skill values.
class FeasibilityObjective {
public:
    explicit FeasibilityObjective(const SkeletonObjective& obj) : obj_(&obj) {}

    double operator()(const MixedSample& s) const {
        const ObjectiveTerms t = obj_->terms(obj_->decode(s));
        return t.psi + t.penalty;
    }

private:
    const SkeletonObjective* obj_;
};

/// Goal-driven baseline: MCTS simulations end on the explicit symbolic goal,
/// and CEM stops at the first incumbent whose rollout verifies.
inline StapResult stap_baseline(const Problem& problem, const SkillLibrary& library, const LspConfig& cfg) {
    cfg.validate();
    problem.validate();
    check_library(problem, library);
    if (problem.goal.empty()) {
        throw ConfigError("stap: problem " + problem.name + " has no symbolic goal");
    }
    StapResult out;
    MctsOptions mo;
    mo.exploration = cfg.exploration;
    mo.max_len = cfg.max_len;
    mo.seed = derive_seed(cfg.seed, 0x53544150);
    mo.reached = [&](const SymbolicState& s, const std::vector<std::size_t>&) { return problem.goal.satisfied(s); };
    SkeletonTree tree(problem.domain, problem.s0, mo);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        out.iterations = it + 1;
        const SkeletonProposal prop = tree.propose();
        if (!prop.ok) {
            break;
        }
        SymbolicState end = replay(problem.s0, problem.domain.operators, prop.skeleton);
        double reward = 0.0;
        if (problem.goal.satisfied(end)) {
            const SkeletonObjective obj(problem, library, prop.skeleton);
            const FeasibilityObjective feas(obj);
            CemConfig cc = cfg.cem;
            cc.seed = derive_seed(cfg.seed, 0x20000 + it);
            cc.accept = [&](const MixedSample& s, double) {
                return verify_solution(problem, library, prop.skeleton, obj.decode(s)).solved;
            };
            const CemResult res = cem_optimize(std::cref(feas), obj.spec(), cc);
            ++out.optimized;
            if (res.accepted) {
                out.found = true;
                out.solution = make_solution(problem, library, obj, obj.decode(res.best));
                tree.backprop(prop, 1.0);
                break;
            }
        }
        tree.backprop(prop, reward);
    }
    return out;
}

} // namespace lspkit
