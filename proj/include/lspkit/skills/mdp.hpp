#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lspkit/tt/grid.hpp"
#include "lspkit/util/error.hpp"
#include "lspkit/util/math.hpp"
#include "lspkit/util/rng.hpp"

namespace lspkit {

/// One state or action dimension. categories > 0 marks a discrete dimension
/// whose values are 0..categories-1.
struct Dim {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t categories = 0;
    bool periodic = false;

    bool discrete() const { return categories > 0; }
};

struct SkillMdp {
    std::string name;
    std::vector<Dim> state;
    std::vector<Dim> action;
    double dt = 0.1;
    double gamma = 0.99;
    std::function<Vec(const Vec&, const Vec&)> transition;
    std::function<double(const Vec&, const Vec&)> reward;
    /// Distance of the position / orientation components from the target.
    std::function<double(const Vec&)> position_error;
    std::function<double(const Vec&)> orientation_error;
    /// For separable integrators: state dimension driven by each action
    /// dimension (x'_s = clamp(x_s + u_j dt)); empty otherwise.
    std::vector<std::size_t> integrates;
    /// Candidate count per action dimension used by the greedy policy.
    std::vector<std::size_t> candidate_counts;
    /// Optional sampler of valid states; the default is uniform on the box.
    std::function<Vec(Rng&)> sampler;

    std::size_t state_dims() const { return state.size(); }
    std::size_t action_dims() const { return action.size(); }
    bool separable() const { return !integrates.empty(); }

    void validate() const {
        if (state.empty() || action.empty()) {
            throw ConfigError(name + ": state and action must be non-empty");
        }
        if (!(gamma > 0.0 && gamma < 1.0)) {
            throw ConfigError(name + ": discount must lie in (0, 1)");
        }
        for (const auto& d : state) {
            if (!d.discrete() && !(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi)) {
                throw ConfigError(name + ": bad bounds for state dimension " + d.name);
            }
        }
        if (candidate_counts.size() != action.size()) {
            throw ConfigError(name + ": one candidate count per action dimension required");
        }
        for (std::size_t j = 0; j < action.size(); ++j) {
            if (!action[j].discrete() && candidate_counts[j] < 3) {
                throw ConfigError(name + ": at least 3 candidates per continuous action dimension");
            }
        }
        if (!transition || !reward) {
            throw ConfigError(name + ": transition and reward are required");
        }
    }

    /// Clamps (or wraps, for periodic dims) a state into the box.
    Vec clamp_state(Vec x) const {
        for (std::size_t k = 0; k < state.size(); ++k) {
            const auto& d = state[k];
            const auto i = static_cast<Eigen::Index>(k);
            if (d.discrete()) {
                x(i) = clamp(std::round(x(i)), 0.0, static_cast<double>(d.categories - 1));
            } else if (d.periodic) {
                x(i) = clamp(wrap_angle(x(i)), d.lo, d.hi);
            } else {
                x(i) = clamp(x(i), d.lo, d.hi);
            }
        }
        return x;
    }

    bool in_bounds(const Vec& x, double tol = 1e-9) const {
        for (std::size_t k = 0; k < state.size(); ++k) {
            const auto& d = state[k];
            const double v = x(static_cast<Eigen::Index>(k));
            const double lo = d.discrete() ? 0.0 : d.lo;
            const double hi = d.discrete() ? static_cast<double>(d.categories - 1) : d.hi;
            if (!(v >= lo - tol && v <= hi + tol)) {
                return false;
            }
        }
        return true;
    }

    Vec step(const Vec& x, const Vec& u) const { return clamp_state(transition(x, u)); }
};

/// Per-dimension candidate values for the action box; discrete dims are
/// enumerated, continuous ones uniformly discretized (endpoints included).
inline std::vector<std::vector<double>> action_candidate_values(const SkillMdp& mdp) {
    std::vector<std::vector<double>> vals;
    for (std::size_t j = 0; j < mdp.action.size(); ++j) {
        const auto& d = mdp.action[j];
        std::vector<double> v;
        if (d.discrete()) {
            for (std::size_t c = 0; c < d.categories; ++c) {
                v.push_back(static_cast<double>(c));
            }
        } else {
            const std::size_t m = mdp.candidate_counts[j];
            for (std::size_t i = 0; i < m; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(m - 1);
                double x = d.lo + t * (d.hi - d.lo);
                if (std::abs(x) < 1e-12 * (d.hi - d.lo)) {
                    x = 0.0;
                }
                v.push_back(x);
            }
        }
        vals.push_back(std::move(v));
    }
    return vals;
}

/// Full candidate list, row-major over action dimensions.
inline std::vector<Vec> action_candidates(const SkillMdp& mdp) {
    const auto vals = action_candidate_values(mdp);
    std::size_t total = 1;
    for (const auto& v : vals) {
        total *= v.size();
    }
    std::vector<Vec> out;
    out.reserve(total);
    for (std::size_t c = 0; c < total; ++c) {
        Vec u(static_cast<Eigen::Index>(vals.size()));
        std::size_t rem = c;
        for (std::size_t j = vals.size(); j-- > 0;) {
            u(static_cast<Eigen::Index>(j)) = vals[j][rem % vals[j].size()];
            rem /= vals[j].size();
        }
        out.push_back(u);
    }
    return out;
}

/// Training grid over the state box; discrete dims get one node per category.
inline Grid state_grid(const SkillMdp& mdp, const std::vector<std::size_t>& counts) {
    if (counts.size() != mdp.state.size()) {
        throw ConfigError(mdp.name + ": grid needs one point count per state dimension");
    }
    std::vector<double> lo, hi;
    std::vector<std::size_t> n;
    for (std::size_t k = 0; k < mdp.state.size(); ++k) {
        const auto& d = mdp.state[k];
        if (d.discrete()) {
            lo.push_back(0.0);
            hi.push_back(static_cast<double>(d.categories - 1));
            n.push_back(d.categories);
        } else {
            lo.push_back(d.lo);
            hi.push_back(d.hi);
            n.push_back(counts[k]);
        }
    }
    return Grid(lo, hi, n);
}

} // namespace lspkit
