#include <cmath>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "lspkit/skills/skills.hpp"
#include "lspkit/value/policy.hpp"
#include "lspkit/value/value_iteration.hpp"

using namespace lspkit;

namespace {

DomainParams params() { return load_domain_params(default_params_path()); }

ViOptions options_for(const SkillConfig& cfg) {
    ViOptions o;
    o.eps = cfg.eps;
    o.max_rank = cfg.max_rank;
    o.max_iters = cfg.max_iters;
    o.cross_eps = cfg.cross_eps;
    return o;
}

ValueFunction train(const SkillMdp& mdp, const SkillConfig& cfg) {
    return tt_value_iteration(mdp, skill_grid(mdp, cfg), options_for(cfg));
}

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) {
        x(i++) = d;
    }
    return x;
}

// Dense value iteration on the pivot node grid. Actions move an integer
// number of cells, so successors stay on nodes and no interpolation is needed.
std::vector<double> tabular_pivot(std::size_t n, std::size_t n_actions, double max_cells, double gamma, double dt) {
    const double pi = std::acos(-1.0);
    const double h = 2.0 * pi / static_cast<double>(n - 1);
    std::vector<double> node(n);
    for (std::size_t i = 0; i < n; ++i) {
        node[i] = -pi + h * static_cast<double>(i);
    }
    std::vector<int> cells;
    std::vector<double> rate;
    for (std::size_t a = 0; a < n_actions; ++a) {
        const double c = -max_cells + 2.0 * max_cells * static_cast<double>(a) / static_cast<double>(n_actions - 1);
        cells.push_back(static_cast<int>(std::lround(c)));
        rate.push_back(c * h / dt);
    }
    std::vector<double> v(n * n, 0.0), nv(n * n);
    for (int it = 0; it < 100000; ++it) {
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double best = -1e300;
                for (std::size_t a = 0; a < cells.size(); ++a) {
                    const int k = std::clamp(static_cast<int>(i) + cells[a], 0, static_cast<int>(n) - 1);
                    const double r = -(std::abs(node[i] - node[j]) / pi + 0.01 * std::abs(rate[a]));
                    best = std::max(best, r + gamma * v[static_cast<std::size_t>(k) * n + j]);
                }
                nv[i * n + j] = best;
                diff = std::max(diff, std::abs(best - v[i * n + j]));
            }
        }
        v.swap(nv);
        if (diff < 1e-12) {
            break;
        }
    }
    return v;
}

} // namespace

TEST(ValueIteration, ZeroRewardGivesZeroValue) {
    const auto p = params();
    const auto cfg = p.skill("pull");
    auto mdp = make_skill(cfg, p);
    mdp.reward = [](const Vec&, const Vec&) { return 0.0; };
    const auto vf = train(mdp, cfg);
    EXPECT_TRUE(vf.converged);
    EXPECT_LE(vf.iterations, 2u);
    Rng rng(1);
    for (int s = 0; s < 200; ++s) {
        EXPECT_EQ(vf(sample_state(mdp, rng)), 0.0);
    }
}

TEST(ValueIteration, PivotMatchesTabular) {
    const auto p = params();
    const auto cfg = p.skill("pivot");
    const auto mdp = make_skill(cfg, p);
    const auto vf = train(mdp, cfg);
    const std::size_t n = cfg.grid[0];
    ASSERT_EQ(cfg.grid[1], n);
    const auto dense = tabular_pivot(n, cfg.candidates[0], cfg.max_cells[0], p.gamma, p.dt);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            err = std::max(err, std::abs(tt_evaluate(vf.tt, {i, j}) - dense[i * n + j]));
        }
    }
    EXPECT_LE(err, 1e-2);
    EXPECT_TRUE(vf.converged);
    EXPECT_LE(vf.residual, 5e-3);
    EXPECT_LE(vf.vmax, 1e-6);
}

TEST(ValueIteration, PullOriginAndTieBreak) {
    const auto p = params();
    const auto cfg = p.skill("pull");
    const auto mdp = make_skill(cfg, p);
    const auto vf = train(mdp, cfg);
    EXPECT_GE(vf(vec({0.0, 0.0, 0.0})), -1e-3);
    GreedyPolicy pol(mdp, vf);
    EXPECT_LT(pol.act(vec({0.0, 0.0, 0.0})).norm(), 1e-12);
    const auto r = rollout(mdp, pol, vec({0.0, 0.0, 0.0}), 200);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.steps, 0u);
    EXPECT_EQ(r.trajectory.size(), 1u);
    EXPECT_EQ(r.cumulative_reward, 0.0);
}

TEST(ValueIteration, PivotActsTowardGoal) {
    const auto p = params();
    const auto cfg = p.skill("pivot");
    const auto mdp = make_skill(cfg, p);
    const auto vf = train(mdp, cfg);
    GreedyPolicy pol(mdp, vf);
    EXPECT_GT(pol.act(vec({0.3, 1.2}))(0), 0.0);
    EXPECT_LT(pol.act(vec({1.2, 0.3}))(0), 0.0);
}

TEST(ValueIteration, PushKeepsFaceWhenTargetAhead) {
    const auto p = params();
    const auto cfg = p.skill("push");
    const auto mdp = make_skill(cfg, p);
    // V = -(x^2 + y^2) is exact in a rank-2 train
    const auto grid = skill_grid(mdp, cfg);
    const auto cr = tt_cross([](const std::vector<double>& x) { return -(x[0] * x[0] + x[1] * x[1]); }, grid,
                             1e-10, 4);
    ValueFunction vf;
    vf.skill = "push";
    vf.tt = cr.tt;
    GreedyPolicy pol(mdp, vf);
    // face 0 pushes along +x in the object frame; the target is ahead
    PushState s{-0.2, 0.0, 0.0, -cfg.half_size, 0.0, 0};
    const Vec u = pol.act(s.vec());
    EXPECT_EQ(std::lround(u(2)), 0);
    EXPECT_GT(u(0), 0.0);
}

TEST(ValueIteration, Deterministic) {
    const auto p = params();
    const auto cfg = p.skill("pivot");
    const auto mdp = make_skill(cfg, p);
    const auto a = train(mdp, cfg);
    const auto b = train(mdp, cfg);
    ASSERT_EQ(a.tt.ranks(), b.tt.ranks());
    for (std::size_t k = 0; k < a.tt.dims(); ++k) {
        EXPECT_EQ(a.tt.core(k).data, b.tt.core(k).data);
    }
    EXPECT_EQ(a.residual, b.residual);
}

TEST(ValueIteration, SaveLoadRoundTrip) {
    const auto p = params();
    const auto cfg = p.skill("pivot");
    const auto mdp = make_skill(cfg, p);
    const auto vf = train(mdp, cfg);
    const auto dir = std::filesystem::temp_directory_path() / "lspkit_value_test";
    std::filesystem::create_directories(dir);
    save_value_function(dir, vf);
    const auto back = load_value_function(dir, "pivot");
    EXPECT_EQ(back.tt.core(0).data, vf.tt.core(0).data);
    EXPECT_EQ(back.vmin, vf.vmin);
    EXPECT_THROW(load_value_function(dir, "pull"), Error);
    std::filesystem::remove_all(dir);
}

TEST(Agreement, Controls) {
    auto returns = [](const Vec& x) { return -std::abs(x(0)); };
    auto sampler = [](Rng& rng) { return vec({uniform(rng, -1.0, 1.0)}); };
    EXPECT_EQ(value_prediction_agreement(returns, returns, sampler, 1000, 3), 1.0);
    Rng noise(17);
    auto random_value = [&](const Vec&) { return uniform(noise, -1.0, 1.0); };
    const double a = value_prediction_agreement(random_value, returns, sampler, 1000, 3);
    EXPECT_GE(a, 0.4);
    EXPECT_LE(a, 0.6);
    auto flat = [](const Vec&) { return 0.0; };
    EXPECT_EQ(value_prediction_agreement(flat, returns, sampler, 100, 3), 0.0);
    EXPECT_THROW(value_prediction_agreement(returns, returns, sampler, 0, 3), ConfigError);
}
