#pragma once

#include <cstdint>
#include <string>

#include "lspkit/lsp/problem.hpp"
#include "lspkit/util/rng.hpp"

namespace lspkit {

/// Seeded random instance of a bundled domain, with the symbolic goal the
/// goal-driven baseline needs.
/// npm: flip the object and place it back on the table.
/// ppm: bring the object to the table edge and grasp it there.
/// pm:  fetch the object with the tool, stow the tool, grasp the object.
inline Problem make_instance(const TaskDomain& domain, std::uint64_t seed) {
    Rng rng(derive_seed(seed, hash_name(domain.name)));
    auto u = [&](double lo, double hi) { return uniform(rng, lo, hi); };
    Problem p;
    p.name = domain.name + "-" + std::to_string(seed);
    p.domain = domain;
    p.s0 = domain.initial_state;
    p.x0 = LongHorizonState(domain.has_tool);
    p.target = LongHorizonState(domain.has_tool);
    LongHorizonState& a = p.x0;
    LongHorizonState& b = p.target;
    if (domain.name == "npm" || domain.name == "ppm") {
        a[kObjX] = u(-0.15, 0.15);
        a[kObjY] = u(-0.2, 0.05);
        a[kObjZ] = 0.05;
        a[kObjYaw] = u(-kPi, kPi);
        a[kEeX] = 0.3;
        a[kEeZ] = 0.3;
        b = a;
        if (domain.name == "npm") {
            b[kObjX] = u(-0.15, 0.15);
            b[kObjY] = u(-0.2, 0.1);
            b[kObjRoll] = kPi / 2;
            b[kObjYaw] = u(-kPi, kPi);
            p.goal.pos = {"AfterFlip o"};
            p.goal.neg = {"AtWall o"};
        } else {
            b[kObjX] = 0.25;
            b[kObjY] = u(-0.15, 0.15);
            b[kObjYaw] = u(-kPi, kPi);
            b[kEeX] = b[kObjX];
            b[kEeY] = b[kObjY];
            b[kEeZ] = b[kObjZ];
            b[kEeYaw] = b[kObjYaw];
            p.goal.pos = {"InHand o"};
        }
    } else if (domain.name == "pm") {
        a[kObjX] = u(0.5, 0.6);
        a[kObjY] = u(-0.1, 0.1);
        a[kObjZ] = 0.05;
        a[kObjYaw] = u(-0.3, 0.3);
        a[kEeX] = 0.2;
        a[kEeZ] = 0.2;
        a[kToolX] = u(0.3, 0.4);
        a[kToolY] = u(-0.3, -0.2);
        b = a;
        b[kObjX] = u(0.25, 0.35);
        b[kObjY] = u(-0.1, 0.1);
        b[kObjYaw] = u(-0.3, 0.3);
        b[kEeX] = b[kObjX];
        b[kEeY] = b[kObjY];
        b[kEeZ] = 0.02;
        b[kEeYaw] = b[kObjYaw];
        b[kToolX] = u(0.15, 0.35);
        b[kToolY] = u(-0.35, -0.15);
        p.goal.pos = {"InHand o"};
    } else {
        throw ConfigError("no instance generator for domain '" + domain.name + "'");
    }
    p.validate();
    return p;
}

inline Problem make_instance(const std::string& domain_name, std::uint64_t seed) {
    return make_instance(load_task_domain(default_domain_path(domain_name)), seed);
}

} // namespace lspkit
