#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lspkit/skills/mdp.hpp"
#include "lspkit/tt/argmax.hpp"
#include "lspkit/tt/cross.hpp"
#include "lspkit/util/rng.hpp"
#include "lspkit/value/backup.hpp"
#include "lspkit/value/value_function.hpp"

namespace lspkit {

struct ViOptions {
    double eps = 1e-3;
    std::size_t max_rank = 100;
    std::size_t max_iters = 200;
    /// Relative cross tolerance; 0 derives it from eps and the value scale.
    double cross_eps = 0.0;
    std::size_t check_samples = 1000;
    std::uint64_t seed = 0;
    CrossOptions cross;
    /// Called after each iteration with (iteration, max |dV|, largest TT rank; 0 while dense).
    std::function<void(std::size_t, double, std::size_t)> progress;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> random_nodes(const Grid& g, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> out(count, std::vector<std::size_t>(g.dims()));
    for (auto& idx : out) {
        for (std::size_t k = 0; k < g.dims(); ++k) {
            idx[k] = uniform_index(rng, g.count(k));
        }
    }
    return out;
}

inline Vec node_point(const Grid& g, std::span<const std::size_t> idx) {
    Vec x(static_cast<Eigen::Index>(g.dims()));
    for (std::size_t k = 0; k < g.dims(); ++k) {
        x(static_cast<Eigen::Index>(k)) = g.point(k, idx[k]);
    }
    return x;
}

inline TensorTrain zero_tt(const Grid& g) {
    std::vector<Core> cores;
    for (std::size_t k = 0; k < g.dims(); ++k) {
        cores.emplace_back(1, g.count(k), 1);
    }
    return TensorTrain(std::move(cores), g);
}

} // namespace detail

/// Max over sampled grid nodes of |V(x) - max_u (R + gamma V(f(x,u)))|.
inline double bellman_residual(const SkillMdp& mdp, const TensorTrain& v, std::size_t samples, std::uint64_t seed) {
    BellmanBackup backup(mdp);
    const auto nodes = detail::random_nodes(v.grid(), samples, seed);
    std::vector<double> err(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t s) {
        const Vec x = detail::node_point(v.grid(), nodes[s]);
        err[s] = std::abs(tt_evaluate(v, nodes[s]) - backup(x, &v).value);
    }, 16);
    return err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

namespace detail {

/// Residual on random nodes and the value range used for normalization:
/// beam search from both ends plus the check sample.
inline void finish_value(ValueFunction& vf, const SkillMdp& mdp, TensorTrain v, const std::vector<double>& sample,
                         const ViOptions& opt) {
    vf.residual = bellman_residual(mdp, v, opt.check_samples, derive_seed(opt.seed, 2));
    double lo = *std::min_element(sample.begin(), sample.end());
    double hi = *std::max_element(sample.begin(), sample.end());
    hi = std::max(hi, tt_argmax(v, 16).value);
    std::vector<Core> neg = v.cores();
    for (double& x : neg[0].data) {
        x = -x;
    }
    lo = std::min(lo, -tt_argmax(TensorTrain(neg, v.grid()), 16).value);
    vf.vmin = lo;
    vf.vmax = hi;
    vf.tt = std::move(v);
}

} // namespace detail

/// V_{j+1} = TTcross(x -> max_u R + gamma V_j(f(x,u))) from V_0 = 0.
inline ValueFunction tt_value_iteration(const SkillMdp& mdp, const Grid& grid, const ViOptions& opt) {
    if (!(opt.eps > 0.0)) {
        throw ConfigError("value iteration: eps must be positive");
    }
    if (grid.dims() != mdp.state_dims()) {
        throw ConfigError(mdp.name + ": grid dimension differs from the state dimension");
    }
    BellmanBackup backup(mdp);
    const auto check = detail::random_nodes(grid, opt.check_samples, derive_seed(opt.seed, 1));
    TensorTrain v = detail::zero_tt(grid);
    bool have_v = false;
    CrossIndexSets warm;
    ValueFunction vf;
    vf.skill = mdp.name;
    vf.gamma = mdp.gamma;
    vf.eps = opt.eps;
    vf.max_rank = opt.max_rank;
    double scale = 1.0;
    std::vector<double> prev(check.size(), 0.0);
    for (std::size_t it = 1; it <= opt.max_iters; ++it) {
        const TensorTrain* vp = have_v ? &v : nullptr;
        IndexOracle oracle = [&](std::span<const std::uint32_t> idx) {
            Vec x(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) {
                x(static_cast<Eigen::Index>(k)) = grid.point(k, idx[k]);
            }
            return backup(x, vp).value;
        };
        // per-sweep errors accumulate by up to 1/(1 - gamma) in the fixed point
        const double ceps =
            opt.cross_eps > 0.0 ? opt.cross_eps : std::min(opt.eps, 0.5 * opt.eps * (1.0 - mdp.gamma) / scale);
        CrossOptions co = opt.cross;
        co.seed = derive_seed(opt.seed, 100 + it);
        CrossResult cr = tt_cross_indexed(oracle, grid, ceps, opt.max_rank, co, warm.empty() ? nullptr : &warm);
        warm = cr.index_sets;
        double delta = 0.0;
        double sq = 0.0;
        std::vector<double> cur(check.size());
        for (std::size_t s = 0; s < check.size(); ++s) {
            cur[s] = tt_evaluate(cr.tt, check[s]);
            delta = std::max(delta, std::abs(cur[s] - prev[s]));
            sq += cur[s] * cur[s];
        }
        scale = std::max(1.0, std::sqrt(sq / static_cast<double>(std::max<std::size_t>(1, check.size()))));
        prev.swap(cur);
        v = std::move(cr.tt);
        have_v = true;
        vf.iterations = it;
        if (opt.progress) {
            const auto r = v.ranks();
            opt.progress(it, delta, *std::max_element(r.begin(), r.end()));
        }
        if (delta <= opt.eps) {
            vf.converged = true;
            break;
        }
    }
    detail::finish_value(vf, mdp, std::move(v), prev, opt);
    return vf;
}

namespace detail {

/// Full grid table with multilinear interpolation; dims where the point
/// sits on a node contribute a single corner.
class DenseTable {
public:
    explicit DenseTable(const Grid& g) : grid_(g), stride_(g.dims()) {
        std::size_t n = 1;
        for (std::size_t k = g.dims(); k-- > 0;) {
            stride_[k] = n;
            n *= g.count(k);
        }
        values_.assign(n, 0.0);
    }

    std::size_t size() const { return values_.size(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t offset(std::span<const std::uint32_t> idx) const {
        std::size_t o = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            o += idx[k] * stride_[k];
        }
        return o;
    }

    Vec point(std::size_t flat) const {
        Vec x(static_cast<Eigen::Index>(grid_.dims()));
        for (std::size_t k = 0; k < grid_.dims(); ++k) {
            x(static_cast<Eigen::Index>(k)) = grid_.point(k, flat / stride_[k]);
            flat %= stride_[k];
        }
        return x;
    }

    double interpolate(const Vec& x) const {
        std::size_t base = 0;
        std::size_t nf = 0;
        std::array<std::size_t, 16> step{};
        std::array<double, 16> frac{};
        for (std::size_t k = 0; k < grid_.dims(); ++k) {
            std::size_t i = 0;
            double t = 0.0;
            grid_.locate(k, x(static_cast<Eigen::Index>(k)), i, t);
            base += i * stride_[k];
            if (t > 0.0) {
                step[nf] = stride_[k];
                frac[nf] = t;
                ++nf;
            }
        }
        double s = 0.0;
        for (std::size_t m = 0; m < (std::size_t{1} << nf); ++m) {
            double w = 1.0;
            std::size_t o = base;
            for (std::size_t j = 0; j < nf; ++j) {
                if ((m >> j) & 1u) {
                    w *= frac[j];
                    o += step[j];
                } else {
                    w *= 1.0 - frac[j];
                }
            }
            s += w * values_[o];
        }
        return s;
    }

private:
    Grid grid_;
    std::vector<std::size_t> stride_;
    std::vector<double> values_;
};

} // namespace detail

/// Same fixed-point iteration with V_j held as a full grid table; the
/// converged table is compressed by TT-cross (rank <= max_rank). Only
/// practical for small grids.
inline ValueFunction dense_value_iteration(const SkillMdp& mdp, const Grid& grid, const ViOptions& opt) {
    if (!(opt.eps > 0.0)) {
        throw ConfigError("value iteration: eps must be positive");
    }
    if (grid.dims() != mdp.state_dims() || grid.dims() > 16) {
        throw ConfigError(mdp.name + ": grid dimension differs from the state dimension");
    }
    double cells = 1.0;
    for (std::size_t k = 0; k < grid.dims(); ++k) {
        cells *= static_cast<double>(grid.count(k));
    }
    if (cells > 2e7) {
        throw ConfigError(mdp.name + ": grid too large for dense value iteration");
    }
    const std::vector<Vec> cands = action_candidates(mdp);
    detail::DenseTable v(grid);
    detail::DenseTable next(grid);
    ValueFunction vf;
    vf.skill = mdp.name;
    vf.gamma = mdp.gamma;
    vf.eps = opt.eps;
    vf.max_rank = opt.max_rank;
    for (std::size_t it = 1; it <= opt.max_iters; ++it) {
        const bool first = it == 1;
        parallel_for(v.size(), [&](std::size_t f) {
            const Vec x = v.point(f);
            double best = -std::numeric_limits<double>::infinity();
            for (const Vec& u : cands) {
                const double q = mdp.reward(x, u) + (first ? 0.0 : mdp.gamma * v.interpolate(mdp.step(x, u)));
                best = std::max(best, q);
            }
            next.values()[f] = best;
        }, 256);
        double delta = 0.0;
        for (std::size_t f = 0; f < v.size(); ++f) {
            delta = std::max(delta, std::abs(next.values()[f] - v.values()[f]));
        }
        std::swap(v, next);
        vf.iterations = it;
        if (opt.progress) {
            opt.progress(it, delta, 0);
        }
        if (delta <= opt.eps) {
            vf.converged = true;
            break;
        }
    }
    IndexOracle table = [&](std::span<const std::uint32_t> idx) { return v.values()[v.offset(idx)]; };
    CrossOptions co = opt.cross;
    co.seed = derive_seed(opt.seed, 100);
    const double ceps = opt.cross_eps > 0.0 ? opt.cross_eps : 0.1 * opt.eps;
    CrossResult cr = tt_cross_indexed(table, grid, ceps, opt.max_rank, co);
    const auto check = detail::random_nodes(grid, opt.check_samples, derive_seed(opt.seed, 1));
    std::vector<double> sample;
    for (const auto& idx : check) {
        sample.push_back(tt_evaluate(cr.tt, idx));
    }
    detail::finish_value(vf, mdp, std::move(cr.tt), sample, opt);
    return vf;
}

} // namespace lspkit
