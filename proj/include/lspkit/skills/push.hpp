#pragma once

#include <array>
#include <cmath>

#include "lspkit/skills/mdp.hpp"
#include "lspkit/skills/params.hpp"

namespace lspkit {

/// Planar pushing state: object pose relative to the target, pusher
/// position in the object frame, and the contact face.
struct PushState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double prx = 0.0;
    double pry = 0.0;
    int face = 0;

    Vec vec() const {
        Vec v(6);
        v << x, y, theta, prx, pry, static_cast<double>(face);
        return v;
    }
    static PushState from(const Vec& v) {
        return {v(0), v(1), v(2), v(3), v(4), static_cast<int>(std::lround(v(5)))};
    }
};

/// Square slider with an ellipsoidal limit surface. Face f has its contact
/// segment at local (-a, s), s in [-a, a], rotated by f*pi/2; face 0 is the
/// -x side and pushes toward +x.
struct PushModel {
    double c = 0.05;
    double mu = 0.3;
    double a = 0.05;

    static std::array<double, 2> rotate(double x, double y, int quarter) {
        switch (((quarter % 4) + 4) % 4) {
        case 0:
            return {x, y};
        case 1:
            return {-y, x};
        case 2:
            return {-x, -y};
        default:
            return {y, -x};
        }
    }

    /// Pusher position of face f at offset s.
    std::array<double, 2> contact_point(int face, double s) const { return rotate(-a, s, face); }

    /// Offset along face f of an object-frame pusher position (projected).
    double face_offset(int face, double prx, double pry) const {
        const auto local = rotate(prx, pry, -face);
        return clamp(local[1], -a, a);
    }

    struct Twist {
        double vx, vy, omega; // object frame
        double slide;         // pusher rate along the face
    };

    /// Object twist for pusher velocity (vn, vt) in the face-0 frame at offset s.
    Twist twist_local(double s, double vn, double vt) const {
        if (vn <= 0.0) {
            return {0.0, 0.0, 0.0, vt};
        }
        const double px = -a;
        const double py = s;
        const double c2 = c * c;
        const double gt = (mu * c2 - px * py + mu * px * px) / (c2 + py * py - mu * px * py);
        const double gb = (-mu * c2 - px * py - mu * px * px) / (c2 + py * py + mu * px * py);
        double ut = vt;
        double slide = 0.0;
        const double ratio = vt / vn;
        if (ratio > gt) {
            ut = gt * vn;
            slide = vt - ut;
        } else if (ratio < gb) {
            ut = gb * vn;
            slide = vt - ut;
        }
        const double den = c2 + px * px + py * py;
        const double vx = ((c2 + px * px) * vn + px * py * ut) / den;
        const double vy = (px * py * vn + (c2 + py * py) * ut) / den;
        const double w = (px * vy - py * vx) / c2;
        return {vx, vy, w, slide};
    }

    /// One step: u = (vn, vt, next_face).
    Vec step(const Vec& x, const Vec& u, double dt) const {
        const PushState st = PushState::from(x);
        const int next_face = static_cast<int>(std::lround(u(2)));
        PushState out = st;
        if (next_face != st.face) {
            const auto p = contact_point(next_face, 0.0);
            out.prx = p[0];
            out.pry = p[1];
            out.face = next_face;
            return out.vec();
        }
        const double s = face_offset(st.face, st.prx, st.pry);
        const Twist tw = twist_local(s, u(0), u(1));
        const auto vb = rotate(tw.vx, tw.vy, st.face);
        const double ct = std::cos(st.theta);
        const double sn = std::sin(st.theta);
        out.x = st.x + (ct * vb[0] - sn * vb[1]) * dt;
        out.y = st.y + (sn * vb[0] + ct * vb[1]) * dt;
        out.theta = wrap_angle(st.theta + tw.omega * dt);
        const double s2 = clamp(s + tw.slide * dt, -a, a);
        const auto p = contact_point(st.face, s2);
        out.prx = p[0];
        out.pry = p[1];
        return out.vec();
    }
};

inline SkillMdp make_push(const SkillConfig& cfg, const DomainParams& p) {
    if (cfg.grid.size() != 6 || cfg.candidates.size() != 3) {
        throw ConfigError(cfg.name + ": push needs 6 grid entries and 3 candidate counts");
    }
    PushModel model{cfg.c, cfg.mu, cfg.half_size};
    SkillMdp m;
    m.name = cfg.name;
    m.dt = p.dt;
    m.gamma = p.gamma;
    const double a = cfg.half_size;
    m.state = {{"x", -0.5, 0.5},   {"y", -0.5, 0.5},   {"theta", -kPi, kPi, 0, true},
               {"prx", -a, a},      {"pry", -a, a},     {"face", 0, 3, 4}};
    m.action = {{"vn", 0.0, cfg.v_max}, {"vt", -cfg.v_max, cfg.v_max}, {"next_face", 0, 3, 4}};
    m.candidate_counts = cfg.candidates;
    const double dt = p.dt;
    m.transition = [model, dt](const Vec& x, const Vec& u) { return model.step(x, u, dt); };
    const double l_p = p.l_p, l_o = p.l_o, rho = cfg.rho;
    m.reward = [l_p, l_o, rho](const Vec& x, const Vec& u) {
        const double cp = std::hypot(x(0), x(1)) / l_p;
        const double co = std::abs(wrap_angle(x(2))) / l_o;
        const double ca = std::hypot(u(0), u(1));
        const double cf = std::lround(u(2)) == std::lround(x(5)) ? 0.0 : 1.0;
        return -(cp + rho * co + 0.01 * ca + 0.1 * cf);
    };
    m.position_error = [](const Vec& x) { return std::hypot(x(0), x(1)); };
    m.orientation_error = [](const Vec& x) { return std::abs(wrap_angle(x(2))); };
    // pusher placed on the boundary of a random face
    m.sampler = [model](Rng& rng) {
        PushState s;
        s.x = uniform(rng, -0.5, 0.5);
        s.y = uniform(rng, -0.5, 0.5);
        s.theta = uniform(rng, -kPi, kPi);
        s.face = static_cast<int>(uniform_index(rng, 4));
        const auto p = model.contact_point(s.face, uniform(rng, -model.a, model.a));
        s.prx = p[0];
        s.pry = p[1];
        return s.vec();
    };
    m.validate();
    return m;
}

} // namespace lspkit
