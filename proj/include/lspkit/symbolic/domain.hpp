#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lspkit/skills/long_horizon.hpp"
#include "lspkit/symbolic/operator.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

/// Operators, entities, initial facts and long-horizon bounds of one task family.
struct TaskDomain {
    std::string name;
    std::vector<std::string> predicates;
    std::map<std::string, std::string> entities;
    bool has_tool = false;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    SymbolicState initial_state;
    std::vector<SkillOperator> operators;

    std::size_t dims() const { return has_tool ? 15 : 12; }

    std::size_t operator_index(const std::string& op) const {
        for (std::size_t i = 0; i < operators.size(); ++i) {
            if (operators[i].name == op) {
                return i;
            }
        }
        throw ConfigError("domain " + name + ": unknown operator '" + op + "'");
    }

    std::vector<std::size_t> skeleton_from_names(const std::vector<std::string>& names) const {
        std::vector<std::size_t> out;
        for (const auto& n : names) {
            out.push_back(operator_index(n));
        }
        return out;
    }

    std::vector<std::string> skeleton_names(const std::vector<std::size_t>& sk) const {
        std::vector<std::string> out;
        for (auto i : sk) {
            out.push_back(operators.at(i).name);
        }
        return out;
    }
};

namespace detail {

inline DimConstraint parse_constraint(const nlohmann::json& j, const std::string& where) {
    DimConstraint c;
    c.dim = j.at("dim").get<std::string>();
    c.kind = j.at("kind").get<std::string>();
    lh_index(c.dim);
    if (c.kind == "set") {
        c.values = j.at("values").get<std::vector<double>>();
        if (c.values.empty()) {
            throw ParseError(where + ": empty set constraint on " + c.dim);
        }
    } else if (c.kind == "interval") {
        c.lo = j.at("lo").get<double>();
        c.hi = j.at("hi").get<double>();
        if (!(c.lo <= c.hi)) {
            throw ParseError(where + ": interval on " + c.dim + " has lo > hi");
        }
    } else if (c.kind == "lock" || c.kind == "offset") {
        c.value = j.at("value").get<double>();
    } else if (c.kind == "tie" || c.kind == "follow") {
        c.source = j.at("source").get<std::string>();
        lh_index(c.source);
        c.value = j.value("value", 0.0);
    } else {
        throw ParseError(where + ": unknown constraint kind '" + c.kind + "'");
    }
    return c;
}

inline void check_atoms(const std::vector<std::string>& atoms, const TaskDomain& d, const std::string& where) {
    for (const auto& a : atoms) {
        const std::string pred = atom_predicate(canonical_atom(a));
        bool known = false;
        for (const auto& p : d.predicates) {
            known = known || p == pred;
        }
        if (!known) {
            throw ParseError(where + ": unknown predicate '" + pred + "'");
        }
    }
}

inline std::vector<std::string> atoms_of(const nlohmann::json& j, const char* key) {
    std::vector<std::string> out;
    if (j.contains(key)) {
        for (const auto& a : j.at(key)) {
            out.push_back(canonical_atom(a.get<std::string>()));
        }
    }
    return out;
}

} // namespace detail

inline TaskDomain parse_task_domain(const nlohmann::json& j, const std::string& source = "<json>") {
    TaskDomain d;
    try {
        d.name = j.at("name").get<std::string>();
        d.predicates = j.at("predicates").get<std::vector<std::string>>();
        d.entities = j.value("entities", std::map<std::string, std::string>{});
        d.has_tool = j.value("has_tool", false);
        const auto lo = j.at("lower").get<std::vector<double>>();
        const auto hi = j.at("upper").get<std::vector<double>>();
        if (lo.size() != d.dims() || hi.size() != d.dims()) {
            throw ParseError(source + ": bounds must have " + std::to_string(d.dims()) + " entries");
        }
        d.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
        d.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size());
        const auto init = detail::atoms_of(j, "initial_state");
        detail::check_atoms(init, d, source);
        d.initial_state = SymbolicState(init);
        for (const auto& jo : j.at("operators")) {
            SkillOperator op;
            op.name = jo.at("name").get<std::string>();
            op.skill = jo.at("skill").get<std::string>();
            const std::string where = source + ": operator " + op.name;
            op.pre_pos = detail::atoms_of(jo, "pre_pos");
            op.pre_neg = detail::atoms_of(jo, "pre_neg");
            op.add = detail::atoms_of(jo, "add");
            op.del = detail::atoms_of(jo, "del");
            for (const auto* v : {&op.pre_pos, &op.pre_neg, &op.add, &op.del}) {
                detail::check_atoms(*v, d, where);
            }
            op.actuated = jo.value("actuated", std::vector<std::string>{});
            for (const auto& a : op.actuated) {
                if (lh_index(a) >= d.dims()) {
                    throw ParseError(where + ": dim " + a + " not in this domain");
                }
            }
            if (jo.contains("subgoal")) {
                for (const auto& c : jo.at("subgoal")) {
                    op.subgoal.push_back(detail::parse_constraint(c, where));
                }
            }
            if (jo.contains("entry")) {
                for (const auto& c : jo.at("entry")) {
                    op.entry.push_back(detail::parse_constraint(c, where));
                }
            }
            for (const auto& c : op.subgoal) {
                if (!op.actuates(c.dim)) {
                    throw ParseError(where + ": subgoal constrains non-actuated dim " + c.dim);
                }
            }
            for (const auto& other : d.operators) {
                if (other.name == op.name) {
                    throw ParseError(where + ": duplicate operator name");
                }
            }
            d.operators.push_back(std::move(op));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
    return d;
}

inline TaskDomain load_task_domain(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open domain file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_task_domain(j, path.string());
}

inline std::filesystem::path default_domain_path(const std::string& name) {
#ifdef LSPKIT_DATA_DIR
    return std::filesystem::path(LSPKIT_DATA_DIR) / "domains" / (name + ".json");
#else
    return std::filesystem::path("data/domains") / (name + ".json");
#endif
}

} // namespace lspkit
