#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lspkit/skills/mdp.hpp"
#include "lspkit/util/rng.hpp"
#include "lspkit/value/backup.hpp"
#include "lspkit/value/value_function.hpp"

namespace lspkit {

/// argmax over the candidate set of R(x,u) + gamma V(f(x,u)); ties go to
/// the first candidate in enumeration order.
class GreedyPolicy {
public:
    GreedyPolicy(const SkillMdp& mdp, const ValueFunction& vf) : mdp_(&mdp), vf_(&vf), backup_(mdp) {}

    Vec act(const Vec& x) const { return backup_.candidates()[backup_(x, &vf_->tt).action]; }

    const SkillMdp& mdp() const { return *mdp_; }
    const ValueFunction& value() const { return *vf_; }

private:
    const SkillMdp* mdp_;
    const ValueFunction* vf_;
    BellmanBackup backup_;
};

struct SuccessThresholds {
    double position = 0.03;
    double orientation = 15.0 * kPi / 180.0;
};

inline bool skill_success(const SkillMdp& mdp, const Vec& x, const SuccessThresholds& th) {
    return mdp.position_error(x) < th.position && mdp.orientation_error(x) < th.orientation;
}

struct RolloutResult {
    std::vector<Vec> trajectory;
    double cumulative_reward = 0.0;
    bool success = false;
    std::size_t steps = 0;
};

/// Runs the policy for at most `horizon` steps, stopping once the success
/// thresholds hold; accumulates sum_t gamma^t R_t.
template <class Policy>
RolloutResult rollout(const SkillMdp& mdp, const Policy& policy, const Vec& x0, std::size_t horizon,
                      const SuccessThresholds& th = {}) {
    RolloutResult res;
    Vec x = mdp.clamp_state(x0);
    res.trajectory.push_back(x);
    double discount = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (skill_success(mdp, x, th)) {
            res.success = true;
            break;
        }
        const Vec u = policy.act(x);
        res.cumulative_reward += discount * mdp.reward(x, u);
        discount *= mdp.gamma;
        x = mdp.step(x, u);
        res.trajectory.push_back(x);
        ++res.steps;
    }
    if (!res.success) {
        res.success = skill_success(mdp, x, th);
    }
    return res;
}

/// Random valid state: the skill's own sampler, else uniform on the box.
inline Vec sample_state(const SkillMdp& mdp, Rng& rng) {
    if (mdp.sampler) {
        return mdp.sampler(rng);
    }
    Vec x(static_cast<Eigen::Index>(mdp.state_dims()));
    for (std::size_t k = 0; k < mdp.state_dims(); ++k) {
        const Dim& d = mdp.state[k];
        x(static_cast<Eigen::Index>(k)) =
            d.discrete() ? static_cast<double>(uniform_index(rng, d.categories)) : uniform(rng, d.lo, d.hi);
    }
    return x;
}

/// Fraction of state pairs on which V and the rollout return order agree.
/// Pairs whose returns differ by less than 1e-6 are redrawn.
inline double value_prediction_agreement(const std::function<double(const Vec&)>& value,
                                         const std::function<double(const Vec&)>& returns,
                                         const std::function<Vec(Rng&)>& sampler, std::size_t n_pairs,
                                         std::uint64_t seed) {
    if (n_pairs < 1) {
        throw ConfigError("agreement needs at least one pair");
    }
    Rng rng(derive_seed(seed, 0xa9));
    std::size_t agree = 0;
    std::size_t kept = 0;
    std::size_t attempts = 0;
    while (kept < n_pairs) {
        if (++attempts > 50 * n_pairs) {
            throw NumericError("agreement: too many pairs with indistinguishable returns");
        }
        const Vec a = sampler(rng);
        const Vec b = sampler(rng);
        const double dr = returns(a) - returns(b);
        if (std::abs(dr) < 1e-6) {
            continue;
        }
        const double dv = value(a) - value(b);
        ++kept;
        if ((dv > 0.0 && dr > 0.0) || (dv < 0.0 && dr < 0.0)) {
            ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(n_pairs);
}

} // namespace lspkit
