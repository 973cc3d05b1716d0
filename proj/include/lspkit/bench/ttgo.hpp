#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "lspkit/cem/cem.hpp"
#include "lspkit/tt/argmax.hpp"
#include "lspkit/tt/cross.hpp"

namespace lspkit {

struct TtgoConfig {
    std::size_t resolution = 64; // nodes per continuous variable
    double eps = 1e-3;
    std::size_t max_rank = 20;
    std::size_t candidates = 50;
    std::uint64_t seed = 0;
};

struct TtgoResult {
    MixedSample best;
    double score = 0.0;
    double approx_time = 0.0; // seconds in TT-cross
    double infer_time = 0.0;  // seconds in tt_argmax
    std::vector<std::size_t> ranks;
    bool converged = false;
};

/// Grid over the variables: continuous ones get `resolution` nodes, each
/// discrete one is a mode indexed by category.
inline Grid ttgo_grid(const VariableSpec& spec, std::size_t resolution) {
    std::vector<double> lo, hi;
    std::vector<std::size_t> n;
    for (std::size_t j = 0; j < spec.continuous(); ++j) {
        lo.push_back(spec.lower[j]);
        hi.push_back(spec.upper[j] > spec.lower[j] ? spec.upper[j] : spec.lower[j] + 1.0);
        n.push_back(spec.upper[j] > spec.lower[j] ? resolution : 2);
    }
    for (const auto& c : spec.categories) {
        lo.push_back(0.0);
        hi.push_back(static_cast<double>(std::max<std::size_t>(c.size(), 2) - 1));
        n.push_back(std::max<std::size_t>(c.size(), 2));
    }
    return Grid(lo, hi, n);
}

inline MixedSample ttgo_sample(const VariableSpec& spec, const Grid& g, std::span<const std::size_t> idx) {
    MixedSample s;
    s.x.resize(static_cast<Eigen::Index>(spec.continuous()));
    for (std::size_t j = 0; j < spec.continuous(); ++j) {
        s.x(static_cast<Eigen::Index>(j)) = spec.upper[j] > spec.lower[j] ? g.point(j, idx[j]) : spec.lower[j];
    }
    for (std::size_t d = 0; d < spec.discrete(); ++d) {
        s.k.push_back(std::min(idx[spec.continuous() + d], spec.categories[d].size() - 1));
    }
    return s;
}

/// TT-cross of the objective on the variable grid, then prioritized
/// traversal of the cores for its maximum.
inline TtgoResult ttgo_optimize(const MixedObjective& objective, const VariableSpec& spec, const TtgoConfig& cfg) {
    spec.validate();
    if (cfg.resolution < 2 || cfg.candidates < 1) {
        throw ConfigError("ttgo: resolution must be >= 2 and candidates >= 1");
    }
    const Grid g = ttgo_grid(spec, cfg.resolution);
    IndexOracle f = [&](std::span<const std::uint32_t> idx) {
        std::vector<std::size_t> i(idx.begin(), idx.end());
        return objective(ttgo_sample(spec, g, i));
    };
    CrossOptions co;
    co.seed = derive_seed(cfg.seed, 0x7474676f);
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const CrossResult cr = tt_cross_indexed(f, g, cfg.eps, cfg.max_rank, co);
    const auto t1 = clock::now();
    const ArgmaxResult am = tt_argmax(cr.tt, cfg.candidates);
    const auto t2 = clock::now();
    TtgoResult r;
    r.best = ttgo_sample(spec, g, am.index);
    r.score = objective(r.best);
    r.approx_time = std::chrono::duration<double>(t1 - t0).count();
    r.infer_time = std::chrono::duration<double>(t2 - t1).count();
    r.ranks = cr.tt.ranks();
    r.converged = cr.converged;
    return r;
}

} // namespace lspkit
