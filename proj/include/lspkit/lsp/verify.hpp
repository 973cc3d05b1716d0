#pragma once

#include <string>
#include <vector>

#include "lspkit/lsp/objective.hpp"
#include "lspkit/value/policy.hpp"

namespace lspkit {

struct StepReport {
    std::string op;
    std::string skill;
    bool skill_success = false;
    std::size_t steps = 0;
    double cumulative_reward = 0.0;
    /// Achieved vs planned subgoal over the operator's actuated dims.
    LhErrors subgoal_error;
    LongHorizonState achieved;
};

struct VerifyResult {
    bool solved = false;
    int feedback = 0;
    LongHorizonState achieved;
    LhErrors final_error;
    std::vector<StepReport> steps;
    /// Broken symbolic preconditions and switch constraints, by name.
    std::vector<std::string> violations;
};

namespace detail {

inline double entry_tolerance(const DimConstraint& c, const Problem& p) {
    return lh_is_angle(lh_index(c.dim)) ? p.orientation_threshold : p.position_threshold;
}

} // namespace detail

/// Symbolic replay, exact switch-domain check, then sequential greedy
/// rollouts threading the long-horizon state. Actuated dims outside the
/// skill's phi follow their constraint from the achieved values.
inline VerifyResult verify_solution(const Problem& problem, const SkillLibrary& library,
                                    const std::vector<std::size_t>& skeleton,
                                    const std::vector<LongHorizonState>& subgoals) {
    VerifyResult r;
    r.achieved = problem.x0;
    if (subgoals.size() != skeleton.size()) {
        r.violations.push_back("subgoal count " + std::to_string(subgoals.size()) + " != skeleton length " +
                               std::to_string(skeleton.size()));
        return r;
    }
    for (const auto& g : subgoals) {
        if (g.size() != problem.domain.dims()) {
            r.violations.push_back("subgoal has " + std::to_string(g.size()) + " entries");
            return r;
        }
    }
    try {
        replay(problem.s0, problem.domain.operators, skeleton);
    } catch (const PreconditionError& e) {
        r.violations.push_back(e.what());
        return r;
    }
    const SkeletonObjective obj(problem, library, skeleton);
    r.violations = obj.domain_violations(subgoals);

    const DomainParams& params = library.params();
    const SuccessThresholds th{params.success_position, params.success_orientation};
    LongHorizonState x = problem.x0;
    for (std::size_t k = 0; k < skeleton.size(); ++k) {
        const SkillOperator& op = problem.domain.operators[skeleton[k]];
        for (const auto& c : op.entry) {
            if (detail::entry_violation(c, x) > detail::entry_tolerance(c, problem)) {
                r.violations.push_back(op.name + ".entry." + c.dim + "." + c.kind);
            }
        }
        const StepPlan& step = obj.steps()[k];
        const SkillEntry& e = *step.skill;
        const GreedyPolicy pi(e.mdp, e.value);
        const Vec s0 = obj.skill_start(k, x, subgoals[k]);
        const RolloutResult ro = rollout(e.mdp, pi, s0, params.horizon, th);

        LongHorizonState next = phi_map(e.map, ro.trajectory.back(), subgoals[k]);
        for (const auto& dp : step.dims) {
            const bool driven = std::find(e.map.dims.begin(), e.map.dims.end(), dp.dim) != e.map.dims.end();
            if (driven) {
                continue;
            }
            if (dp.kind == SlotKind::Fixed) {
                next[dp.dim] = dp.value;
            } else if (dp.kind == SlotKind::Offset) {
                next[dp.dim] = detail::angle_aware(dp.dim, x[dp.dim] + dp.value);
            }
        }
        for (const auto& dp : step.dims) {
            if (dp.kind == SlotKind::Tie &&
                std::find(e.map.dims.begin(), e.map.dims.end(), dp.dim) == e.map.dims.end()) {
                next[dp.dim] = detail::angle_aware(dp.dim, next[dp.source] + dp.value);
            }
        }
        for (const auto& dp : step.dims) {
            if (dp.kind == SlotKind::Follow &&
                std::find(e.map.dims.begin(), e.map.dims.end(), dp.dim) == e.map.dims.end()) {
                next[dp.dim] = detail::angle_aware(dp.dim, x[dp.dim] + (next[dp.source] - x[dp.source]));
            }
        }

        StepReport rep;
        rep.op = op.name;
        rep.skill = op.skill;
        rep.skill_success = ro.success;
        rep.steps = ro.steps;
        rep.cumulative_reward = ro.cumulative_reward;
        for (const auto& dp : step.dims) {
            const double d = detail::dim_gap(dp.dim, next[dp.dim], subgoals[k][dp.dim]);
            if (lh_is_angle(dp.dim)) {
                rep.subgoal_error.orientation = std::max(rep.subgoal_error.orientation, d);
            } else {
                rep.subgoal_error.position = std::max(rep.subgoal_error.position, d);
            }
        }
        rep.achieved = next;
        r.steps.push_back(std::move(rep));
        x = next;
    }
    r.achieved = x;
    r.final_error = lh_errors(x, problem.target);
    r.solved = r.violations.empty() && problem.reached(x);
    r.feedback = r.solved ? 1 : 0;
    return r;
}

} // namespace lspkit
