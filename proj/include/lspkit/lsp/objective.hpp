#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lspkit/cem/cem.hpp"
#include "lspkit/lsp/problem.hpp"
#include "lspkit/value/library.hpp"

namespace lspkit {

/// How one actuated dim of a subgoal gets its value.
enum class SlotKind { Continuous, Discrete, Fixed, Offset, Tie, Follow };

struct DimPlan {
    std::size_t dim = 0;
    SlotKind kind = SlotKind::Fixed;
    std::size_t var = 0; // continuous or discrete variable index
    double value = 0.0;
    std::size_t source = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;
    std::string constraint; // "<op>.<subgoal|entry>.<dim>.<kind>", empty when unconstrained
};

struct StepPlan {
    std::size_t op = 0;
    const SkillEntry* skill = nullptr;
    std::vector<DimPlan> dims;
};

/// Summed value terms, target term and penalties at fixed subgoals.
struct ObjectiveTerms {
    std::vector<double> values;
    double psi = 0.0;
    double penalty = 0.0;

    double total() const {
        double s = psi + penalty;
        for (double v : values) {
            s += v;
        }
        return s;
    }
};

namespace detail {

inline double angle_aware(std::size_t dim, double v) { return lh_is_angle(dim) ? wrap_angle(v) : v; }

inline double dim_gap(std::size_t dim, double a, double b) {
    return lh_is_angle(dim) ? std::abs(wrap_angle(a - b)) : std::abs(a - b);
}

/// Distance of x from satisfying an entry constraint on its start state.
inline double entry_violation(const DimConstraint& c, const LongHorizonState& x) {
    const std::size_t d = lh_index(c.dim);
    const double v = x[d];
    if (c.kind == "set") {
        double best = std::numeric_limits<double>::infinity();
        for (double s : c.values) {
            best = std::min(best, dim_gap(d, v, s));
        }
        return best;
    }
    if (c.kind == "interval") {
        return std::max({0.0, c.lo - v, v - c.hi});
    }
    if (c.kind == "lock") {
        return dim_gap(d, v, c.value);
    }
    if (c.kind == "tie") {
        return dim_gap(d, v, x[lh_index(c.source)] + c.value);
    }
    return 0.0;
}

inline bool is_domain_kind(const DimConstraint& c) {
    return c.kind == "set" || c.kind == "interval" || c.kind == "lock";
}

} // namespace detail

/// Objective of one skeleton over its subgoal variables:
///   sum_k V_k(Gamma_k(xbar_k0, xbar_kT)) + lambda ||xbar_KT - xbar_T|| - penalties.
/// Switch constraints become variable domains where the operator drives the
/// dim; the remaining entry constraints and out-of-box skill states are
/// penalized with weight |lambda|.
class SkeletonObjective {
public:
    SkeletonObjective(const Problem& problem, const SkillLibrary& library, std::vector<std::size_t> skeleton)
        : problem_(&problem), library_(&library), skeleton_(std::move(skeleton)) {
        const auto& ops = problem.domain.operators;
        replay(problem.s0, ops, skeleton_);
        for (std::size_t k = 0; k < skeleton_.size(); ++k) {
            const SkillOperator& op = ops.at(skeleton_[k]);
            const SkillOperator* next = k + 1 < skeleton_.size() ? &ops[skeleton_[k + 1]] : nullptr;
            StepPlan step;
            step.op = skeleton_[k];
            step.skill = &library.at(op.skill);
            for (const auto& name : op.actuated) {
                step.dims.push_back(plan_dim(op, next, name));
            }
            for (std::size_t d : step.skill->map.dims) {
                if (!op.actuates(lh_names()[d])) {
                    throw ConfigError(op.name + ": skill dim " + lh_names()[d] + " is not actuated");
                }
            }
            for (const auto& dp : step.dims) {
                const bool driven = std::find(step.skill->map.dims.begin(), step.skill->map.dims.end(), dp.dim) !=
                                    step.skill->map.dims.end();
                if (!driven && (dp.kind == SlotKind::Continuous || dp.kind == SlotKind::Discrete)) {
                    throw ConfigError(op.name + ": " + lh_names()[dp.dim] +
                                      " is neither driven by the skill nor fixed by a constraint");
                }
            }
            steps_.push_back(std::move(step));
        }
    }

    const VariableSpec& spec() const { return spec_; }
    const std::vector<StepPlan>& steps() const { return steps_; }
    const std::vector<std::size_t>& skeleton() const { return skeleton_; }
    const Problem& problem() const { return *problem_; }

    /// Subgoal sequence xbar_{1T..KT} for a sample.
    std::vector<LongHorizonState> decode(const MixedSample& s) const {
        std::vector<LongHorizonState> out;
        LongHorizonState prev = problem_->x0;
        for (const auto& step : steps_) {
            LongHorizonState x = prev;
            for (const auto& dp : step.dims) {
                switch (dp.kind) {
                case SlotKind::Continuous:
                    x[dp.dim] = s.x(static_cast<Eigen::Index>(dp.var));
                    break;
                case SlotKind::Discrete:
                    x[dp.dim] = dp.values.at(s.k.at(dp.var));
                    break;
                case SlotKind::Fixed:
                    x[dp.dim] = dp.value;
                    break;
                case SlotKind::Offset:
                    x[dp.dim] = detail::angle_aware(dp.dim, prev[dp.dim] + dp.value);
                    break;
                default:
                    break;
                }
            }
            for (const auto& dp : step.dims) {
                if (dp.kind == SlotKind::Tie) {
                    x[dp.dim] = detail::angle_aware(dp.dim, x[dp.source] + dp.value);
                }
            }
            for (const auto& dp : step.dims) {
                if (dp.kind == SlotKind::Follow) {
                    x[dp.dim] = detail::angle_aware(dp.dim, prev[dp.dim] + (x[dp.source] - prev[dp.source]));
                }
            }
            out.push_back(x);
            prev = x;
        }
        return out;
    }

    /// V of step k's skill for moving from `start` to `goal`, with the
    /// out-of-box excess of the skill state reported separately.
    double step_value(std::size_t k, const LongHorizonState& start, const LongHorizonState& goal,
                      double* excess = nullptr) const {
        const SkillEntry& e = *steps_.at(k).skill;
        const Vec g = gamma_map(e.map, start, goal);
        double ex = 0.0;
        if (e.config.model == "push") {
            Vec off = g;
            for (Eigen::Index j = 0; j < 3; ++j) {
                const Dim& d = e.mdp.state[static_cast<std::size_t>(j)];
                const double c = clamp(off(j), d.lo, d.hi);
                ex += (off(j) - c) * (off(j) - c);
                off(j) = c;
            }
            double best = -std::numeric_limits<double>::infinity();
            for (const Vec& s : push_states_for_offset(off, e.config.half_size)) {
                best = std::max(best, e.value.clamped(s));
            }
            if (excess) {
                *excess = std::sqrt(ex);
            }
            return best;
        }
        Vec s = g;
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            const Dim& d = e.mdp.state[static_cast<std::size_t>(j)];
            const double c = clamp(s(j), d.lo, d.hi);
            ex += (s(j) - c) * (s(j) - c);
            s(j) = c;
        }
        if (excess) {
            *excess = std::sqrt(ex);
        }
        return e.value(s);
    }

    /// Skill start state for executing step k (push: best face by V).
    Vec skill_start(std::size_t k, const LongHorizonState& start, const LongHorizonState& goal) const {
        const SkillEntry& e = *steps_.at(k).skill;
        const Vec g = gamma_map(e.map, start, goal);
        if (e.config.model != "push") {
            return e.mdp.clamp_state(g);
        }
        Vec out;
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& s : push_states_for_offset(g, e.config.half_size)) {
            const Vec c = e.mdp.clamp_state(s);
            const double v = e.value(c);
            if (v > best) {
                best = v;
                out = c;
            }
        }
        return out;
    }

    ObjectiveTerms terms(const std::vector<LongHorizonState>& subgoals) const {
        ObjectiveTerms t;
        const double w = std::abs(problem_->lambda);
        LongHorizonState prev = problem_->x0;
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const SkillOperator& op = problem_->domain.operators[steps_[k].op];
            for (const auto& c : op.entry) {
                t.penalty -= w * detail::entry_violation(c, prev);
            }
            double ex = 0.0;
            t.values.push_back(step_value(k, prev, subgoals.at(k), &ex));
            t.penalty -= w * ex;
            prev = subgoals[k];
        }
        t.psi = problem_->lambda * lh_distance(prev, problem_->target);
        return t;
    }

    double score(const std::vector<LongHorizonState>& subgoals) const { return terms(subgoals).total(); }

    double operator()(const MixedSample& s) const { return score(decode(s)); }

    /// Names of switch constraints the planned subgoals break (exact check).
    std::vector<std::string> domain_violations(const std::vector<LongHorizonState>& subgoals) const {
        std::vector<std::string> bad;
        if (subgoals.size() != steps_.size()) {
            bad.push_back("subgoal count");
            return bad;
        }
        LongHorizonState prev = problem_->x0;
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const LongHorizonState& x = subgoals[k];
            for (std::size_t d = 0; d < x.size(); ++d) {
                const bool actuated = std::any_of(steps_[k].dims.begin(), steps_[k].dims.end(),
                                                  [&](const DimPlan& p) { return p.dim == d; });
                if (!actuated && x[d] != prev[d]) {
                    bad.push_back(problem_->domain.operators[steps_[k].op].name + ".inherit." + lh_names()[d]);
                }
            }
            for (const auto& dp : steps_[k].dims) {
                if (!dim_ok(dp, prev, x)) {
                    bad.push_back(dp.constraint.empty() ? lh_names()[dp.dim] : dp.constraint);
                }
            }
            prev = x;
        }
        return bad;
    }

private:
    static bool dim_ok(const DimPlan& dp, const LongHorizonState& prev, const LongHorizonState& x) {
        const double v = x[dp.dim];
        const double tol = 1e-9;
        switch (dp.kind) {
        case SlotKind::Continuous:
            return v >= dp.lo - tol && v <= dp.hi + tol;
        case SlotKind::Discrete:
            return std::find(dp.values.begin(), dp.values.end(), v) != dp.values.end();
        case SlotKind::Fixed:
            return detail::dim_gap(dp.dim, v, dp.value) <= tol;
        case SlotKind::Offset:
            return detail::dim_gap(dp.dim, v, prev[dp.dim] + dp.value) <= tol;
        case SlotKind::Tie:
            return detail::dim_gap(dp.dim, v, x[dp.source] + dp.value) <= tol;
        case SlotKind::Follow:
            return detail::dim_gap(dp.dim, v, prev[dp.dim] + x[dp.source] - prev[dp.source]) <= tol;
        }
        return false;
    }

    DimPlan plan_dim(const SkillOperator& op, const SkillOperator* next, const std::string& name) {
        DimPlan p;
        p.dim = lh_index(name);
        const DimConstraint* sub = op.subgoal_on(name);
        const DimConstraint* ent = next ? next->entry_on(name) : nullptr;
        if (ent && !detail::is_domain_kind(*ent)) {
            ent = nullptr;
        }
        if (sub && sub->deterministic()) {
            p.constraint = op.name + ".subgoal." + name + "." + sub->kind;
            p.value = sub->value;
            if (sub->kind == "lock") {
                p.kind = SlotKind::Fixed;
            } else if (sub->kind == "offset") {
                p.kind = SlotKind::Offset;
            } else {
                p.kind = sub->kind == "tie" ? SlotKind::Tie : SlotKind::Follow;
                p.source = lh_index(sub->source);
            }
            return p;
        }
        const DimConstraint* dom = ent ? ent : sub;
        if (dom) {
            p.constraint = (ent ? next->name + ".entry." : op.name + ".subgoal.") + name + "." + dom->kind;
        }
        const bool narrow = ent && sub && sub->kind == "interval";
        if (dom && dom->kind == "lock") {
            p.kind = SlotKind::Fixed;
            p.value = dom->value;
        } else if (dom && dom->kind == "set") {
            p.kind = SlotKind::Discrete;
            for (double v : dom->values) {
                if (!narrow || (v >= sub->lo && v <= sub->hi)) {
                    p.values.push_back(v);
                }
            }
            if (p.values.empty()) {
                p.values = dom->values;
            }
            p.var = spec_.categories.size();
            spec_.categories.push_back(p.values);
        } else {
            p.kind = SlotKind::Continuous;
            p.lo = problem_->domain.lower(static_cast<Eigen::Index>(p.dim));
            p.hi = problem_->domain.upper(static_cast<Eigen::Index>(p.dim));
            if (dom && dom->kind == "interval") {
                p.lo = dom->lo;
                p.hi = dom->hi;
                if (narrow && std::max(dom->lo, sub->lo) <= std::min(dom->hi, sub->hi)) {
                    p.lo = std::max(dom->lo, sub->lo);
                    p.hi = std::min(dom->hi, sub->hi);
                }
            }
            p.var = spec_.lower.size();
            spec_.lower.push_back(p.lo);
            spec_.upper.push_back(p.hi);
        }
        return p;
    }

    const Problem* problem_;
    const SkillLibrary* library_;
    std::vector<std::size_t> skeleton_;
    std::vector<StepPlan> steps_;
    VariableSpec spec_;
};

inline SkeletonObjective build_objective(const Problem& problem, const SkillLibrary& library,
                                         const std::vector<std::size_t>& skeleton) {
    return SkeletonObjective(problem, library, skeleton);
}

} // namespace lspkit
