#pragma once

#include <string>

#include "lspkit/skills/integrators.hpp"
#include "lspkit/skills/mdp.hpp"
#include "lspkit/skills/params.hpp"
#include "lspkit/skills/push.hpp"

namespace lspkit {

inline SkillMdp make_skill(const SkillConfig& cfg, const DomainParams& p) {
    if (cfg.model == "push") {
        return make_push(cfg, p);
    }
    if (cfg.model == "pivot") {
        return make_pivot(cfg, p);
    }
    if (cfg.model == "pull") {
        return make_pull(cfg, p);
    }
    if (cfg.model == "pickplace") {
        return make_pickplace(cfg, p);
    }
    throw ConfigError("skill '" + cfg.name + "' has unknown model '" + cfg.model + "'");
}

inline SkillMdp make_skill(const std::string& name, const DomainParams& p) { return make_skill(p.skill(name), p); }

/// Grid of a skill's value function.
inline Grid skill_grid(const SkillMdp& mdp, const SkillConfig& cfg) { return state_grid(mdp, cfg.grid); }

} // namespace lspkit
