#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lspkit/skills/params.hpp"
#include "lspkit/skills/push.hpp"
#include "lspkit/util/error.hpp"
#include "lspkit/util/math.hpp"

namespace lspkit {

/// Long-horizon layout: object SE(3), end-effector SE(3), optional tool SE(2).
/// Euler angles are intrinsic Z-Y-X, stored as roll, pitch, yaw.
enum LhIndex : std::size_t {
    kObjX = 0, kObjY, kObjZ, kObjRoll, kObjPitch, kObjYaw,
    kEeX, kEeY, kEeZ, kEeRoll, kEePitch, kEeYaw,
    kToolX, kToolY, kToolYaw,
    kLhMaxDims
};

inline const std::array<std::string, kLhMaxDims>& lh_names() {
    static const std::array<std::string, kLhMaxDims> names = {
        "obj_x", "obj_y", "obj_z", "obj_roll", "obj_pitch", "obj_yaw",
        "ee_x",  "ee_y",  "ee_z",  "ee_roll",  "ee_pitch",  "ee_yaw",
        "tool_x", "tool_y", "tool_yaw"};
    return names;
}

inline bool lh_is_angle(std::size_t k) {
    return k == kObjRoll || k == kObjPitch || k == kObjYaw || k == kEeRoll || k == kEePitch || k == kEeYaw ||
           k == kToolYaw;
}

inline std::size_t lh_index(const std::string& name) {
    const auto& n = lh_names();
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] == name) {
            return k;
        }
    }
    throw ConfigError("unknown long-horizon dimension '" + name + "'");
}

struct LongHorizonState {
    Eigen::VectorXd v;

    LongHorizonState() = default;
    explicit LongHorizonState(bool tool) : v(Eigen::VectorXd::Zero(tool ? 15 : 12)) {}
    explicit LongHorizonState(Eigen::VectorXd values) : v(std::move(values)) {
        if (v.size() != 12 && v.size() != 15) {
            throw ConfigError("long-horizon state must have 12 or 15 entries");
        }
    }

    bool has_tool() const { return v.size() == 15; }
    std::size_t size() const { return static_cast<std::size_t>(v.size()); }
    double& operator[](std::size_t k) { return v(static_cast<Eigen::Index>(k)); }
    double operator[](std::size_t k) const { return v(static_cast<Eigen::Index>(k)); }

    bool operator==(const LongHorizonState& o) const { return v.size() == o.v.size() && v == o.v; }
};

/// Componentwise difference a - b with wrapped angles.
inline Eigen::VectorXd lh_difference(const LongHorizonState& a, const LongHorizonState& b) {
    if (a.size() != b.size()) {
        throw ConfigError("long-horizon states of different layouts");
    }
    Eigen::VectorXd d = a.v - b.v;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (lh_is_angle(k)) {
            d(static_cast<Eigen::Index>(k)) = wrap_angle(d(static_cast<Eigen::Index>(k)));
        }
    }
    return d;
}

/// Norm of the wrapped difference.
inline double lh_distance(const LongHorizonState& a, const LongHorizonState& b) { return lh_difference(a, b).norm(); }

/// Largest position and orientation errors between two states.
struct LhErrors {
    double position = 0.0;
    double orientation = 0.0;
};

inline LhErrors lh_errors(const LongHorizonState& a, const LongHorizonState& b) {
    const Eigen::VectorXd d = lh_difference(a, b);
    LhErrors e;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double x = std::abs(d(static_cast<Eigen::Index>(k)));
        if (lh_is_angle(k)) {
            e.orientation = std::max(e.orientation, x);
        } else {
            e.position = std::max(e.position, x);
        }
    }
    return e;
}

/// How a skill's local state relates to the long-horizon state.
struct SkillMap {
    std::string skill;
    std::string model;
    std::vector<std::size_t> dims; // phi_k

    static SkillMap from_config(const SkillConfig& cfg) {
        SkillMap m;
        m.skill = cfg.name;
        m.model = cfg.model;
        for (const auto& n : cfg.phi) {
            m.dims.push_back(lh_index(n));
        }
        const std::size_t expect = cfg.model == "pivot" ? 1 : cfg.model == "pickplace" ? 6 : 3;
        if (m.dims.size() != expect) {
            throw ConfigError(cfg.name + ": phi must list " + std::to_string(expect) + " dimensions");
        }
        return m;
    }

    bool goal_augmented() const { return model == "pivot"; }
};

/// Gamma: difference of the skill dims (angles wrapped), or for the pivot
/// the concatenation of start and goal angle.
inline Vec gamma_map(const SkillMap& m, const LongHorizonState& start, const LongHorizonState& goal) {
    for (std::size_t k : m.dims) {
        if (k >= start.size() || k >= goal.size()) {
            throw ConfigError(m.skill + ": dimension " + lh_names()[k] + " absent from state");
        }
    }
    if (m.goal_augmented()) {
        Vec s(2);
        s << start[m.dims[0]], goal[m.dims[0]];
        return s;
    }
    Vec s(static_cast<Eigen::Index>(m.dims.size()));
    for (std::size_t j = 0; j < m.dims.size(); ++j) {
        double d = start[m.dims[j]] - goal[m.dims[j]];
        if (lh_is_angle(m.dims[j])) {
            d = wrap_angle(d);
        }
        s(static_cast<Eigen::Index>(j)) = d;
    }
    return s;
}

/// Phi: writes a skill state back into the skill dims of xbar. Difference
/// states are offsets from xbar; the pivot angle is absolute.
inline LongHorizonState phi_map(const SkillMap& m, const Vec& skill_state, const LongHorizonState& xbar) {
    LongHorizonState out = xbar;
    if (m.goal_augmented()) {
        out[m.dims[0]] = skill_state(0);
        return out;
    }
    if (static_cast<std::size_t>(skill_state.size()) < m.dims.size()) {
        throw ConfigError(m.skill + ": skill state too short for phi");
    }
    for (std::size_t j = 0; j < m.dims.size(); ++j) {
        double v = xbar[m.dims[j]] + skill_state(static_cast<Eigen::Index>(j));
        if (lh_is_angle(m.dims[j])) {
            v = wrap_angle(v);
        }
        out[m.dims[j]] = v;
    }
    return out;
}

/// Push states for a planar offset, one per contact face with the pusher
/// at the face center.
inline std::vector<Vec> push_states_for_offset(const Vec& offset, double half_size) {
    PushModel model;
    model.a = half_size;
    std::vector<Vec> out;
    for (int f = 0; f < 4; ++f) {
        const auto p = model.contact_point(f, 0.0);
        PushState s{offset(0), offset(1), offset(2), p[0], p[1], f};
        out.push_back(s.vec());
    }
    return out;
}

} // namespace lspkit
