#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/skills/long_horizon.hpp"
#include "lspkit/symbolic/domain.hpp"
#include "lspkit/tt/io.hpp"

namespace lspkit {

/// One long-horizon task: start, target and the operator set to plan with.
struct Problem {
    std::string name;
    TaskDomain domain;
    LongHorizonState x0;
    LongHorizonState target;
    SymbolicState s0;
    /// Weight of the target term; negative so that distance is penalized.
    double lambda = -100.0;
    double position_threshold = 0.03;
    double orientation_threshold = 15.0 * kPi / 180.0;
    std::filesystem::path library_dir;
    /// Only used by the symbolic-goal baseline.
    SymbolicGoal goal;

    void validate() const {
        if (x0.size() != domain.dims() || target.size() != domain.dims()) {
            throw ConfigError("problem " + name + ": states must have " + std::to_string(domain.dims()) + " entries");
        }
        if (lambda == 0.0) {
            throw ConfigError("problem " + name + ": lambda must be non-zero");
        }
        if (!(position_threshold > 0.0) || !(orientation_threshold > 0.0)) {
            throw ConfigError("problem " + name + ": thresholds must be positive");
        }
    }

    /// Within both thresholds of the target.
    bool reached(const LongHorizonState& x) const {
        const auto e = lh_errors(x, target);
        return e.position < position_threshold && e.orientation < orientation_threshold;
    }
};

inline Eigen::VectorXd json_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> std_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Domain given by name resolves to the bundled file; otherwise a path
/// relative to the problem file.
inline Problem parse_problem(const nlohmann::json& j, const std::filesystem::path& base = {},
                             const std::string& source = "<json>") {
    Problem p;
    try {
        p.name = j.value("name", std::string("problem"));
        const std::string dom = j.at("domain").get<std::string>();
        std::filesystem::path dpath = dom;
        if (dpath.extension() != ".json") {
            dpath = default_domain_path(dom);
        } else if (dpath.is_relative()) {
            dpath = base / dpath;
        }
        p.domain = load_task_domain(dpath);
        p.x0 = LongHorizonState(json_vector(j.at("x0")));
        p.target = LongHorizonState(json_vector(j.at("target")));
        p.s0 = p.domain.initial_state;
        if (j.contains("initial_state")) {
            p.s0 = SymbolicState(j.at("initial_state").get<std::vector<std::string>>());
        }
        p.lambda = j.value("lambda", p.lambda);
        if (j.contains("thresholds")) {
            p.position_threshold = j["thresholds"].value("position", p.position_threshold);
            p.orientation_threshold = j["thresholds"].value("orientation", p.orientation_threshold);
        }
        if (j.contains("library")) {
            std::filesystem::path lib = j.at("library").get<std::string>();
            p.library_dir = lib.is_relative() && !base.empty() ? base / lib : lib;
        }
        if (j.contains("symbolic_goal")) {
            for (const auto& a : j["symbolic_goal"].value("pos", std::vector<std::string>{})) {
                p.goal.pos.push_back(canonical_atom(a));
            }
            for (const auto& a : j["symbolic_goal"].value("neg", std::vector<std::string>{})) {
                p.goal.neg.push_back(canonical_atom(a));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(source + ": " + e.what());
    }
    p.validate();
    return p;
}

inline Problem load_problem(const std::filesystem::path& path) {
    return parse_problem(read_json(path), path.parent_path(), path.string());
}

inline nlohmann::json problem_json(const Problem& p) {
    nlohmann::json j;
    j["name"] = p.name;
    j["domain"] = p.domain.name;
    j["x0"] = std_vector(p.x0.v);
    j["target"] = std_vector(p.target.v);
    j["lambda"] = p.lambda;
    j["thresholds"] = {{"position", p.position_threshold}, {"orientation", p.orientation_threshold}};
    if (!p.library_dir.empty()) {
        j["library"] = p.library_dir.string();
    }
    if (!p.goal.empty()) {
        j["symbolic_goal"] = {{"pos", p.goal.pos}, {"neg", p.goal.neg}};
    }
    return j;
}

} // namespace lspkit
