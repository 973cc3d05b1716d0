#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/tt/io.hpp"
#include "lspkit/util/error.hpp"
#include "lspkit/util/math.hpp"

namespace lspkit {

/// Training and model parameters of one skill.
struct SkillConfig {
    std::string name;
    std::string model; // push | pivot | pull | pickplace
    std::vector<std::size_t> grid;
    std::vector<std::size_t> candidates;
    /// Integrators: largest per-step increment in grid cells, per action dim.
    std::vector<double> max_cells;
    /// Push: largest pusher speed (m/s).
    double v_max = 1.0;
    double rho = 1.0;
    double c = 0.05;
    double mu = 0.3;
    double half_size = 0.05;
    double eps = 1e-3;
    std::size_t max_rank = 100;
    std::size_t max_iters = 200;
    /// Relative TT-cross tolerance; 0 derives it from eps and the value scale.
    double cross_eps = 0.0;
    /// Sweep cap per TT-cross call; 0 keeps the cross default.
    std::size_t cross_sweeps = 0;
    /// "tt" iterates on TT-cross; "dense" tabulates the grid, then compresses.
    std::string backend = "tt";
    std::vector<std::string> phi;
};

struct DomainParams {
    double dt = 0.1;
    double gamma = 0.99;
    double l_p = 0.5;
    double l_o = kPi;
    double success_position = 0.03;
    double success_orientation = 15.0 * kPi / 180.0;
    std::size_t horizon = 200;
    std::map<std::string, SkillConfig> skills;

    const SkillConfig& skill(const std::string& name) const {
        auto it = skills.find(name);
        if (it == skills.end()) {
            throw ConfigError("unknown skill '" + name + "'");
        }
        return it->second;
    }

    std::vector<std::string> skill_names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : skills) {
            out.push_back(k);
        }
        return out;
    }
};

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* key, const T& fallback, const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + "." + key + ": " + e.what());
    }
}

} // namespace detail

inline DomainParams parse_domain_params(const nlohmann::json& j, const std::string& source = "params") {
    DomainParams p;
    if (!j.is_object()) {
        throw ParseError(source + ": top level must be an object");
    }
    p.dt = detail::field(j, "dt", p.dt, source);
    p.gamma = detail::field(j, "gamma", p.gamma, source);
    p.l_p = detail::field(j, "l_p", p.l_p, source);
    p.l_o = detail::field(j, "l_o", p.l_o, source);
    p.success_position = detail::field(j, "success_position", p.success_position, source);
    p.success_orientation = detail::field(j, "success_orientation", p.success_orientation, source);
    p.horizon = detail::field(j, "horizon", p.horizon, source);
    if (!(p.dt > 0.0)) {
        throw ParseError(source + ".dt: must be positive");
    }
    if (!(p.gamma > 0.0 && p.gamma < 1.0)) {
        throw ParseError(source + ".gamma: must lie in (0, 1)");
    }
    if (!j.contains("skills") || !j["skills"].is_object()) {
        throw ParseError(source + ".skills: missing object");
    }
    for (const auto& [name, s] : j["skills"].items()) {
        const std::string where = source + ".skills." + name;
        SkillConfig c;
        c.name = name;
        c.model = detail::field<std::string>(s, "model", name, where);
        c.grid = detail::field(s, "grid", c.grid, where);
        c.candidates = detail::field(s, "candidates", c.candidates, where);
        c.max_cells = detail::field(s, "max_cells", c.max_cells, where);
        c.v_max = detail::field(s, "v_max", c.v_max, where);
        c.rho = detail::field(s, "rho", c.rho, where);
        c.c = detail::field(s, "c", c.c, where);
        c.mu = detail::field(s, "mu", c.mu, where);
        c.half_size = detail::field(s, "half_size", c.half_size, where);
        c.eps = detail::field(s, "eps", c.eps, where);
        c.max_rank = detail::field(s, "max_rank", c.max_rank, where);
        c.max_iters = detail::field(s, "max_iters", c.max_iters, where);
        c.cross_eps = detail::field(s, "cross_eps", c.cross_eps, where);
        c.cross_sweeps = detail::field(s, "cross_sweeps", c.cross_sweeps, where);
        c.phi = detail::field(s, "phi", c.phi, where);
        c.backend = detail::field(s, "backend", c.backend, where);
        if (c.backend != "tt" && c.backend != "dense") {
            throw ParseError(where + ".backend: must be \"tt\" or \"dense\"");
        }
        if (c.grid.empty()) {
            throw ParseError(where + ".grid: missing");
        }
        if (!(c.eps > 0.0)) {
            throw ParseError(where + ".eps: must be positive");
        }
        if (c.max_rank < 1) {
            throw ParseError(where + ".max_rank: must be at least 1");
        }
        p.skills.emplace(name, std::move(c));
    }
    return p;
}

inline DomainParams load_domain_params(const std::filesystem::path& path) {
    return parse_domain_params(read_json(path), path.filename().string());
}

inline std::filesystem::path default_params_path() {
#ifdef LSPKIT_DATA_DIR
    return std::filesystem::path(LSPKIT_DATA_DIR) / "skills.json";
#else
    return "data/skills.json";
#endif
}

} // namespace lspkit
