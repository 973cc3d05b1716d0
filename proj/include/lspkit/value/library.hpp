#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/skills/long_horizon.hpp"
#include "lspkit/skills/skills.hpp"
#include "lspkit/value/policy.hpp"
#include "lspkit/value/value_iteration.hpp"

namespace lspkit {

inline nlohmann::json skill_config_json(const SkillConfig& c) {
    nlohmann::json j;
    j["model"] = c.model;
    j["grid"] = c.grid;
    j["candidates"] = c.candidates;
    j["max_cells"] = c.max_cells;
    j["v_max"] = c.v_max;
    j["rho"] = c.rho;
    j["c"] = c.c;
    j["mu"] = c.mu;
    j["half_size"] = c.half_size;
    j["eps"] = c.eps;
    j["max_rank"] = c.max_rank;
    j["max_iters"] = c.max_iters;
    j["cross_eps"] = c.cross_eps;
    j["cross_sweeps"] = c.cross_sweeps;
    j["phi"] = c.phi;
    j["backend"] = c.backend;
    return j;
}

/// (skill, iteration, max |dV|, largest rank).
using TrainProgress = std::function<void(const std::string&, std::size_t, double, std::size_t)>;

/// Value iteration with the skill's own settings.
inline ValueFunction train_skill(const SkillConfig& cfg, const DomainParams& p, std::uint64_t seed = 0,
                                 const TrainProgress& progress = {}) {
    const SkillMdp mdp = make_skill(cfg, p);
    ViOptions o;
    o.eps = cfg.eps;
    o.max_rank = cfg.max_rank;
    o.max_iters = cfg.max_iters;
    o.cross_eps = cfg.cross_eps;
    o.seed = derive_seed(seed, hash_name(cfg.name));
    if (cfg.cross_sweeps > 0) {
        o.cross.max_sweeps = cfg.cross_sweeps;
        o.cross.min_sweeps = std::min(o.cross.min_sweeps, cfg.cross_sweeps);
    }
    if (progress) {
        o.progress = [&](std::size_t it, double dv, std::size_t r) { progress(cfg.name, it, dv, r); };
    }
    const Grid grid = skill_grid(mdp, cfg);
    ValueFunction vf =
        cfg.backend == "dense" ? dense_value_iteration(mdp, grid, o) : tt_value_iteration(mdp, grid, o);
    vf.config = skill_config_json(cfg);
    vf.config["seed"] = seed;
    return vf;
}

/// One trained skill: its MDP, long-horizon map and value function.
struct SkillEntry {
    SkillConfig config;
    SkillMdp mdp;
    SkillMap map;
    ValueFunction value;
};

/// Read-only set of trained skills. Entries never move once loaded.
class SkillLibrary {
public:
    SkillLibrary() = default;
    explicit SkillLibrary(DomainParams params) : params_(std::move(params)) {}

    void add(ValueFunction vf) {
        const SkillConfig& cfg = params_.skill(vf.skill);
        SkillEntry e{cfg, make_skill(cfg, params_), SkillMap::from_config(cfg), std::move(vf)};
        if (e.value.tt.dims() != e.mdp.state_dims()) {
            throw LibraryError("value function for " + cfg.name + " has the wrong dimension");
        }
        entries_.erase(cfg.name);
        entries_.emplace(cfg.name, std::move(e));
    }

    bool has(const std::string& skill) const { return entries_.count(skill) > 0; }

    const SkillEntry& at(const std::string& skill) const {
        auto it = entries_.find(skill);
        if (it == entries_.end()) {
            throw LibraryError("no trained value function for skill '" + skill + "'");
        }
        return it->second;
    }

    const DomainParams& params() const { return params_; }
    std::vector<std::string> skills() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_) {
            out.push_back(k);
        }
        return out;
    }

    /// Loads every requested skill from dir/<skill>.tt.
    static SkillLibrary load(const std::filesystem::path& dir, const DomainParams& params,
                             const std::vector<std::string>& skills) {
        SkillLibrary lib(params);
        for (const auto& s : skills) {
            if (!std::filesystem::exists(value_file(dir, s))) {
                throw LibraryError("skill library " + dir.string() + " has no value function for '" + s + "'");
            }
            lib.add(load_value_function(dir, s));
        }
        return lib;
    }

private:
    DomainParams params_;
    std::map<std::string, SkillEntry> entries_;
};

} // namespace lspkit
