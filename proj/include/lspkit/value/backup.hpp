#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "lspkit/skills/mdp.hpp"
#include "lspkit/tt/tensor_train.hpp"

namespace lspkit {

struct BackupResult {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t action = 0; // index into the candidate list
};

/// Evaluates max_u R(x,u) + gamma V(f(x,u)) over the candidate action set.
/// Separable integrators use product-grid interpolation; other skills
/// deduplicate identical successor states before interpolating.
class BellmanBackup {
public:
    explicit BellmanBackup(const SkillMdp& mdp)
        : mdp_(&mdp), values_(action_candidate_values(mdp)), candidates_(action_candidates(mdp)) {
        if (mdp.separable()) {
            if (mdp.integrates.size() != mdp.action.size() ||
                !std::is_sorted(mdp.integrates.begin(), mdp.integrates.end()) ||
                std::adjacent_find(mdp.integrates.begin(), mdp.integrates.end()) != mdp.integrates.end()) {
                throw ConfigError(mdp.name + ": integrator dims must be strictly increasing");
            }
        }
    }

    const std::vector<Vec>& candidates() const { return candidates_; }
    const SkillMdp& mdp() const { return *mdp_; }

    /// V == nullptr means V = 0.
    BackupResult operator()(const Vec& x, const TensorTrain* v) const {
        return mdp_->separable() ? separable(x, v) : general(x, v);
    }

    /// Q-values of every candidate, in enumeration order.
    std::vector<double> q_values(const Vec& x, const TensorTrain* v) const {
        std::vector<double> q(candidates_.size());
        if (mdp_->separable()) {
            auto next = next_values_separable(x, v);
            for (std::size_t c = 0; c < candidates_.size(); ++c) {
                q[c] = mdp_->reward(x, candidates_[c]) + mdp_->gamma * next[c];
            }
        } else {
            for (std::size_t c = 0; c < candidates_.size(); ++c) {
                const Vec y = mdp_->step(x, candidates_[c]);
                q[c] = mdp_->reward(x, candidates_[c]) + mdp_->gamma * (v ? tt_interpolate(*v, y) : 0.0);
            }
        }
        return q;
    }

private:
    std::vector<double> next_values_separable(const Vec& x, const TensorTrain* v) const {
        if (v == nullptr) {
            return std::vector<double>(candidates_.size(), 0.0);
        }
        std::vector<std::vector<double>> coords(mdp_->state.size());
        for (std::size_t s = 0; s < coords.size(); ++s) {
            coords[s] = {x(static_cast<Eigen::Index>(s))};
        }
        for (std::size_t j = 0; j < mdp_->integrates.size(); ++j) {
            const std::size_t s = mdp_->integrates[j];
            const Dim& d = mdp_->state[s];
            coords[s].clear();
            for (double u : values_[j]) {
                coords[s].push_back(clamp(x(static_cast<Eigen::Index>(s)) + u * mdp_->dt, d.lo, d.hi));
            }
        }
        return tt_interpolate_product(*v, coords);
    }

    BackupResult separable(const Vec& x, const TensorTrain* v) const {
        const auto next = next_values_separable(x, v);
        BackupResult best;
        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            const double q = mdp_->reward(x, candidates_[c]) + mdp_->gamma * next[c];
            if (q > best.value) {
                best.value = q;
                best.action = c;
            }
        }
        return best;
    }

    BackupResult general(const Vec& x, const TensorTrain* v) const {
        const std::size_t m = candidates_.size();
        std::vector<Vec> next(m);
        std::vector<double> r(m);
        for (std::size_t c = 0; c < m; ++c) {
            next[c] = mdp_->step(x, candidates_[c]);
            r[c] = mdp_->reward(x, candidates_[c]);
        }
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        auto less = [&](std::size_t a, std::size_t b) {
            const Vec& p = next[a];
            const Vec& q = next[b];
            for (Eigen::Index k = 0; k < p.size(); ++k) {
                if (p(k) != q(k)) {
                    return p(k) < q(k);
                }
            }
            return a < b;
        };
        std::sort(order.begin(), order.end(), less);
        std::vector<double> vnext(m, 0.0);
        std::size_t g = 0;
        while (g < m) {
            std::size_t e = g + 1;
            while (e < m && next[order[e]] == next[order[g]]) {
                ++e;
            }
            const double val = v ? tt_interpolate(*v, next[order[g]]) : 0.0;
            for (std::size_t k = g; k < e; ++k) {
                vnext[order[k]] = val;
            }
            g = e;
        }
        BackupResult best;
        for (std::size_t c = 0; c < m; ++c) {
            const double q = r[c] + mdp_->gamma * vnext[c];
            if (q > best.value) {
                best.value = q;
                best.action = c;
            }
        }
        return best;
    }

    const SkillMdp* mdp_;
    std::vector<std::vector<double>> values_;
    std::vector<Vec> candidates_;
};

} // namespace lspkit
