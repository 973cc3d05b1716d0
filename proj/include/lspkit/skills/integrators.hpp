#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lspkit/skills/mdp.hpp"
#include "lspkit/skills/params.hpp"

namespace lspkit {

/// Goal-augmented pivot state.
struct PivotState {
    double beta = 0.0;
    double beta_goal = 0.0;

    Vec vec() const {
        Vec v(2);
        v << beta, beta_goal;
        return v;
    }
    static PivotState from(const Vec& v) { return {v(0), v(1)}; }
};

/// Planar object pose relative to the target.
struct PullState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec vec() const {
        Vec v(3);
        v << x, y, theta;
        return v;
    }
    static PullState from(const Vec& v) { return {v(0), v(1), v(2)}; }
};

/// End-effector pose relative to the target (xyz, then intrinsic ZYX angles
/// stored as roll alpha, pitch beta, yaw theta).
struct PickPlaceState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double theta = 0.0;

    Vec vec() const {
        Vec v(6);
        v << x, y, z, alpha, beta, theta;
        return v;
    }
    static PickPlaceState from(const Vec& v) { return {v(0), v(1), v(2), v(3), v(4), v(5)}; }
};

namespace detail {

/// Action bound so that candidate increments are multiples of the grid spacing.
inline double aligned_bound(const Dim& d, std::size_t n, double cells, double dt) {
    const double h = (d.hi - d.lo) / static_cast<double>(n - 1);
    return cells * h / dt;
}

inline void check_sizes(const SkillConfig& cfg, std::size_t state_dims, std::size_t action_dims) {
    if (cfg.grid.size() != state_dims) {
        throw ConfigError(cfg.name + ": grid needs " + std::to_string(state_dims) + " entries");
    }
    if (cfg.candidates.size() != action_dims || cfg.max_cells.size() != action_dims) {
        throw ConfigError(cfg.name + ": candidates and max_cells need " + std::to_string(action_dims) +
                          " entries");
    }
}

} // namespace detail

inline SkillMdp make_pivot(const SkillConfig& cfg, const DomainParams& p) {
    detail::check_sizes(cfg, 2, 1);
    SkillMdp m;
    m.name = cfg.name;
    m.dt = p.dt;
    m.gamma = p.gamma;
    m.state = {{"beta", -kPi, kPi}, {"beta_goal", -kPi, kPi}};
    const double w = detail::aligned_bound(m.state[0], cfg.grid[0], cfg.max_cells[0], p.dt);
    m.action = {{"beta_rate", -w, w}};
    m.candidate_counts = cfg.candidates;
    m.integrates = {0};
    const double l_o = p.l_o;
    const double rho = cfg.rho;
    const double dt = p.dt;
    m.transition = [dt](const Vec& x, const Vec& u) {
        Vec y = x;
        y(0) += u(0) * dt;
        return y;
    };
    m.reward = [l_o, rho](const Vec& x, const Vec& u) {
        return -(rho * std::abs(x(0) - x(1)) / l_o + 0.01 * std::abs(u(0)));
    };
    m.position_error = [](const Vec&) { return 0.0; };
    m.orientation_error = [](const Vec& x) { return std::abs(x(0) - x(1)); };
    m.validate();
    return m;
}

inline SkillMdp make_pull(const SkillConfig& cfg, const DomainParams& p) {
    detail::check_sizes(cfg, 3, 3);
    SkillMdp m;
    m.name = cfg.name;
    m.dt = p.dt;
    m.gamma = p.gamma;
    m.state = {{"x", -0.5, 0.5}, {"y", -0.5, 0.5}, {"theta", -kPi, kPi}};
    const char* names[3] = {"vx", "vy", "omega"};
    for (std::size_t j = 0; j < 3; ++j) {
        const double b = detail::aligned_bound(m.state[j], cfg.grid[j], cfg.max_cells[j], p.dt);
        m.action.push_back({names[j], -b, b});
    }
    m.candidate_counts = cfg.candidates;
    m.integrates = {0, 1, 2};
    const double dt = p.dt;
    m.transition = [dt](const Vec& x, const Vec& u) {
        Vec y = x + u * dt;
        return y;
    };
    const double l_p = p.l_p, l_o = p.l_o, rho = cfg.rho;
    m.reward = [l_p, l_o, rho](const Vec& x, const Vec& u) {
        return -(std::hypot(x(0), x(1)) / l_p + rho * std::abs(x(2)) / l_o + 0.01 * u.norm());
    };
    m.position_error = [](const Vec& x) { return std::hypot(x(0), x(1)); };
    m.orientation_error = [](const Vec& x) { return std::abs(wrap_angle(x(2))); };
    m.validate();
    return m;
}

inline SkillMdp make_pickplace(const SkillConfig& cfg, const DomainParams& p) {
    detail::check_sizes(cfg, 6, 6);
    SkillMdp m;
    m.name = cfg.name;
    m.dt = p.dt;
    m.gamma = p.gamma;
    m.state = {{"x", -0.5, 0.5},      {"y", -0.5, 0.5},     {"z", -0.5, 0.5},
               {"alpha", -kPi, kPi}, {"beta", -kPi, kPi}, {"theta", -kPi, kPi}};
    const char* names[6] = {"vx", "vy", "vz", "w_alpha", "w_beta", "w_theta"};
    for (std::size_t j = 0; j < 6; ++j) {
        const double b = detail::aligned_bound(m.state[j], cfg.grid[j], cfg.max_cells[j], p.dt);
        m.action.push_back({names[j], -b, b});
    }
    m.candidate_counts = cfg.candidates;
    m.integrates = {0, 1, 2, 3, 4, 5};
    const double dt = p.dt;
    m.transition = [dt](const Vec& x, const Vec& u) {
        Vec y = x + u * dt;
        return y;
    };
    const double l_p = p.l_p, l_o = p.l_o, rho = cfg.rho;
    m.reward = [l_p, l_o, rho](const Vec& x, const Vec& u) {
        return -(x.head(3).norm() / l_p + rho * x.tail(3).norm() / l_o + 0.01 * u.norm());
    };
    m.position_error = [](const Vec& x) { return x.head(3).norm(); };
    m.orientation_error = [](const Vec& x) {
        Eigen::Vector3d a(wrap_angle(x(3)), wrap_angle(x(4)), wrap_angle(x(5)));
        return a.norm();
    };
    m.validate();
    return m;
}

} // namespace lspkit
