#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "lspkit/tt/io.hpp"
#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/math.hpp"

namespace lspkit {

/// TT-backed state value of one skill.
struct ValueFunction {
    std::string skill;
    TensorTrain tt;
    double gamma = 0.99;
    double eps = 1e-3;
    std::size_t max_rank = 100;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = 0.0;
    double vmin = 0.0;
    double vmax = 0.0;
    nlohmann::json config = nlohmann::json::object();

    double operator()(const Vec& x) const { return tt_interpolate(tt, x); }

    /// Clamps x into the grid box before interpolating.
    double clamped(const Vec& x) const {
        Vec y = x;
        const Grid& g = tt.grid();
        for (std::size_t k = 0; k < g.dims(); ++k) {
            y(static_cast<Eigen::Index>(k)) = clamp(y(static_cast<Eigen::Index>(k)), g.lower(k), g.upper(k));
        }
        return tt_interpolate(tt, y);
    }

    nlohmann::json metadata() const {
        nlohmann::json j;
        j["skill"] = skill;
        j["gamma"] = gamma;
        j["iterations"] = iterations;
        j["converged"] = converged;
        j["residual"] = residual;
        j["v_min"] = vmin;
        j["v_max"] = vmax;
        j["ranks"] = tt.ranks();
        j["config"] = config;
        return j;
    }
};

inline std::filesystem::path value_file(const std::filesystem::path& dir, const std::string& skill) {
    return dir / (skill + ".tt");
}

inline void save_value_function(const std::filesystem::path& dir, const ValueFunction& vf) {
    std::filesystem::create_directories(dir);
    save_tt(value_file(dir, vf.skill), vf.tt, vf.eps, vf.max_rank, "lspkit tt_value_iteration", vf.metadata());
}

inline ValueFunction load_value_function(const std::filesystem::path& dir, const std::string& skill) {
    const auto path = value_file(dir, skill);
    ValueFunction vf;
    vf.tt = read_tt(path);
    const auto meta = read_json(sidecar_path(path));
    try {
        vf.skill = meta.at("skill").get<std::string>();
        vf.gamma = meta.at("gamma").get<double>();
        vf.eps = meta.at("eps").get<double>();
        vf.max_rank = meta.at("max_rank").get<std::size_t>();
        vf.iterations = meta.at("iterations").get<std::size_t>();
        vf.converged = meta.at("converged").get<bool>();
        vf.residual = meta.at("residual").get<double>();
        vf.vmin = meta.at("v_min").get<double>();
        vf.vmax = meta.at("v_max").get<double>();
        vf.config = meta.value("config", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(sidecar_path(path).string() + ": " + e.what());
    }
    if (vf.skill != skill) {
        throw ParseError(path.string() + ": holds skill '" + vf.skill + "', expected '" + skill + "'");
    }
    return vf;
}

} // namespace lspkit
