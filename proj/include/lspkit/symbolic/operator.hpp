#pragma once

#include <string>
#include <vector>

#include "lspkit/symbolic/state.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

/// Constraint on one long-horizon dimension of a subgoal.
///   set      dim takes one of `values`
///   interval dim in [lo, hi]
///   lock     dim == value
///   offset   dim == dim at the operator's start + value
///   tie      dim == source dim of the same subgoal + value
///   follow   dim shifts by the same amount as the source dim
struct DimConstraint {
    std::string dim;
    std::string kind;
    std::vector<double> values;
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    std::string source;

    bool deterministic() const { return kind == "lock" || kind == "offset" || kind == "tie" || kind == "follow"; }
};

struct SkillOperator {
    std::string name;
    std::string skill;
    std::vector<std::string> pre_pos;
    std::vector<std::string> pre_neg;
    std::vector<std::string> add;
    std::vector<std::string> del;
    /// Long-horizon dims this operator may change.
    std::vector<std::string> actuated;
    /// Dims of the skill's own phi that the operator drives (defaults to all).
    std::vector<DimConstraint> subgoal;
    /// Constraints on the configuration this operator starts from.
    std::vector<DimConstraint> entry;

    const DimConstraint* subgoal_on(const std::string& dim) const {
        for (const auto& c : subgoal) {
            if (c.dim == dim) {
                return &c;
            }
        }
        return nullptr;
    }
    const DimConstraint* entry_on(const std::string& dim) const {
        for (const auto& c : entry) {
            if (c.dim == dim) {
                return &c;
            }
        }
        return nullptr;
    }
    bool actuates(const std::string& dim) const {
        for (const auto& d : actuated) {
            if (d == dim) {
                return true;
            }
        }
        return false;
    }
};

/// Positive preconditions held and negative ones absent.
inline bool is_applicable(const SymbolicState& s, const SkillOperator& op) {
    for (const auto& a : op.pre_pos) {
        if (!s.contains(a)) {
            return false;
        }
    }
    for (const auto& a : op.pre_neg) {
        if (s.contains(a)) {
            return false;
        }
    }
    return true;
}

/// Applicable operators in declaration order.
inline std::vector<std::size_t> applicable(const SymbolicState& s, const std::vector<SkillOperator>& ops) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (is_applicable(s, ops[i])) {
            out.push_back(i);
        }
    }
    return out;
}

/// (s \ del) U add.
inline SymbolicState succ(const SymbolicState& s, const SkillOperator& op) {
    if (!is_applicable(s, op)) {
        throw PreconditionError("operator " + op.name + " is not applicable");
    }
    SymbolicState out = s;
    for (const auto& a : op.del) {
        out.erase(a);
    }
    for (const auto& a : op.add) {
        out.insert(a);
    }
    return out;
}

/// Replays a skeleton; throws PreconditionError naming the failing step.
inline SymbolicState replay(const SymbolicState& s0, const std::vector<SkillOperator>& ops,
                            const std::vector<std::size_t>& skeleton) {
    SymbolicState s = s0;
    for (std::size_t k = 0; k < skeleton.size(); ++k) {
        const auto& op = ops.at(skeleton[k]);
        if (!is_applicable(s, op)) {
            throw PreconditionError("step " + std::to_string(k + 1) + ": operator " + op.name +
                                    " is not applicable");
        }
        s = succ(s, op);
    }
    return s;
}

/// Goal given as atoms that must hold and atoms that must not.
struct SymbolicGoal {
    std::vector<std::string> pos;
    std::vector<std::string> neg;

    bool empty() const { return pos.empty() && neg.empty(); }
    bool satisfied(const SymbolicState& s) const {
        for (const auto& a : pos) {
            if (!s.contains(a)) {
                return false;
            }
        }
        for (const auto& a : neg) {
            if (s.contains(a)) {
                return false;
            }
        }
        return true;
    }
};

} // namespace lspkit
