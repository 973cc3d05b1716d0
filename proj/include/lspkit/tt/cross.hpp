#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "lspkit/tt/maxvol.hpp"
#include "lspkit/tt/round.hpp"
#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/error.hpp"
#include "lspkit/util/parallel.hpp"
#include "lspkit/util/rng.hpp"

namespace lspkit {

using MultiIndex = std::vector<std::uint32_t>;

/// Oracle over grid multi-indices; must be pure and reentrant.
using IndexOracle = std::function<double(std::span<const std::uint32_t>)>;

struct CrossOptions {
    std::size_t max_sweeps = 25; // directional passes
    std::size_t min_sweeps = 2;
    std::size_t init_rank = 2;
    std::size_t kick = 2;
    std::uint64_t seed = 0;
    /// Tolerance of the final recompression, relative to eps.
    double round_factor = 0.1;
    /// Rank detection threshold, relative to eps. Skeleton errors exceed
    /// the SVD tail, so fibers are truncated well below the target.
    double rank_factor = 0.1;
};

/// Right index sets J_1..J_{d-1}; reusable as a warm start.
struct CrossIndexSets {
    std::vector<std::vector<MultiIndex>> right;
    bool empty() const { return right.empty(); }
};

struct CrossResult {
    TensorTrain tt;
    bool converged = false;
    std::size_t sweeps = 0;
    std::size_t evaluations = 0;
    double change = std::numeric_limits<double>::infinity();
    CrossIndexSets index_sets;
};

namespace detail {

class CrossCache {
public:
    explicit CrossCache(const Grid& g) {
        double total = 1.0;
        for (std::size_t k = 0; k < g.dims(); ++k) {
            strides_.push_back(0);
            total *= static_cast<double>(g.count(k));
        }
        linear_ = total < 9.0e18;
        std::uint64_t s = 1;
        for (std::size_t k = g.dims(); k-- > 0;) {
            strides_[k] = s;
            if (linear_) {
                s *= g.count(k);
            }
        }
    }

    std::string key(const MultiIndex& idx) const {
        if (linear_) {
            std::uint64_t v = 0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                v += strides_[k] * idx[k];
            }
            return std::string(reinterpret_cast<const char*>(&v), sizeof(v));
        }
        return std::string(reinterpret_cast<const char*>(idx.data()), idx.size() * sizeof(std::uint32_t));
    }

    const double* find(const std::string& k) const {
        auto it = map_.find(k);
        return it == map_.end() ? nullptr : &it->second;
    }
    void insert(std::string k, double v) { map_.emplace(std::move(k), v); }
    std::size_t size() const { return map_.size(); }

private:
    std::vector<std::uint64_t> strides_;
    bool linear_ = true;
    std::unordered_map<std::string, double> map_;
};

/// Values f(L[a], i, R[b]) laid out as (a*n + i)*|R| + b.
inline std::vector<double> cross_fibers(const IndexOracle& f, CrossCache& cache, std::size_t d, std::size_t k,
                                        std::size_t n, const std::vector<MultiIndex>& left,
                                        const std::vector<MultiIndex>& right) {
    const std::size_t total = left.size() * n * right.size();
    std::vector<double> out(total);
    std::vector<MultiIndex> pending;
    std::vector<std::string> pending_keys;
    std::vector<std::size_t> slot(total);
    std::unordered_map<std::string, std::size_t> fresh;
    std::vector<std::size_t> resolved_from_cache;
    MultiIndex idx(d);
    std::size_t pos = 0;
    for (const auto& l : left) {
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& r : right) {
                std::copy(l.begin(), l.end(), idx.begin());
                idx[k] = static_cast<std::uint32_t>(i);
                std::copy(r.begin(), r.end(), idx.begin() + static_cast<std::ptrdiff_t>(k + 1));
                std::string key = cache.key(idx);
                if (const double* v = cache.find(key)) {
                    out[pos] = *v;
                    slot[pos] = std::numeric_limits<std::size_t>::max();
                } else {
                    auto it = fresh.find(key);
                    if (it == fresh.end()) {
                        fresh.emplace(key, pending.size());
                        slot[pos] = pending.size();
                        pending.push_back(idx);
                        pending_keys.push_back(std::move(key));
                    } else {
                        slot[pos] = it->second;
                    }
                }
                ++pos;
            }
        }
    }
    std::vector<double> values(pending.size());
    parallel_for(pending.size(), [&](std::size_t j) {
        values[j] = f(std::span<const std::uint32_t>(pending[j]));
    }, 8);
    for (std::size_t j = 0; j < pending.size(); ++j) {
        if (!std::isfinite(values[j])) {
            throw NumericError("tt_cross: oracle returned a non-finite value");
        }
        cache.insert(std::move(pending_keys[j]), values[j]);
    }
    for (std::size_t p = 0; p < total; ++p) {
        if (slot[p] != std::numeric_limits<std::size_t>::max()) {
            out[p] = values[slot[p]];
        }
    }
    return out;
}

inline double capped_product(const Grid& g, std::size_t from, std::size_t to) {
    double p = 1.0;
    for (std::size_t k = from; k < to; ++k) {
        p *= static_cast<double>(g.count(k));
    }
    return p;
}

/// Appends up to `extra` random distinct multi-indices over dims [from, to).
inline void add_random_indices(std::vector<MultiIndex>& set, std::size_t extra, const Grid& g,
                               std::size_t from, std::size_t to, Rng& rng) {
    const double space = capped_product(g, from, to);
    std::set<MultiIndex> seen(set.begin(), set.end());
    std::size_t attempts = 0;
    while (extra > 0 && static_cast<double>(seen.size()) < space && attempts < 50 * (extra + 1)) {
        ++attempts;
        MultiIndex m(to - from);
        for (std::size_t k = from; k < to; ++k) {
            m[k - from] = static_cast<std::uint32_t>(uniform_index(rng, g.count(k)));
        }
        if (seen.insert(m).second) {
            set.push_back(std::move(m));
            --extra;
        }
    }
}

struct RankChoice {
    Eigen::Index rank;
    bool saturated;
};

/// `bound` is the largest rank the bond can hold (max_rank and unfolding sizes).
inline RankChoice choose_rank(const Eigen::VectorXd& sigma, double rel_tol, std::size_t kick,
                              std::size_t max_rank, double bound) {
    const double total = sigma.norm();
    Eigen::Index rho = total > 0.0 ? truncation_rank(sigma, rel_tol * total) : 1;
    const bool saturated = rho >= sigma.size();
    Eigen::Index r = std::min<Eigen::Index>(rho + static_cast<Eigen::Index>(kick), sigma.size());
    r = std::min<Eigen::Index>(r, static_cast<Eigen::Index>(max_rank));
    return {std::max<Eigen::Index>(1, r), saturated && static_cast<double>(sigma.size()) < bound};
}

} // namespace detail

/// Alternating one-site maxvol cross approximation over grid indices.
inline CrossResult tt_cross_indexed(const IndexOracle& f, const Grid& grid, double eps, std::size_t max_rank,
                                    const CrossOptions& opt = {}, const CrossIndexSets* warm = nullptr) {
    if (!(eps > 0.0)) {
        throw ConfigError("tt_cross: eps must be positive");
    }
    if (max_rank < 1) {
        throw ConfigError("tt_cross: max_rank must be at least 1");
    }
    const std::size_t d = grid.dims();
    detail::CrossCache cache(grid);
    CrossResult res;
    if (d == 1) {
        std::vector<MultiIndex> unit{MultiIndex{}};
        auto vals = detail::cross_fibers(f, cache, 1, 0, grid.count(0), unit, unit);
        Core c(1, grid.count(0), 1);
        c.data = vals;
        res.tt = TensorTrain({c}, grid);
        res.converged = true;
        res.sweeps = 1;
        res.change = 0.0;
        res.evaluations = cache.size();
        return res;
    }

    Rng rng(derive_seed(opt.seed, 0x7474u));
    const double rel_tol = opt.rank_factor * eps / std::sqrt(static_cast<double>(d - 1));
    std::vector<std::vector<MultiIndex>> left(d + 1);
    std::vector<std::vector<MultiIndex>> right(d + 1);
    left[0] = {MultiIndex{}};
    right[d] = {MultiIndex{}};
    for (std::size_t k = 1; k < d; ++k) {
        bool ok = false;
        if (warm != nullptr && warm->right.size() == d + 1 && !warm->right[k].empty()) {
            ok = true;
            for (const auto& m : warm->right[k]) {
                if (m.size() != d - k) {
                    ok = false;
                    break;
                }
                for (std::size_t j = 0; j < m.size(); ++j) {
                    if (m[j] >= grid.count(k + j)) {
                        ok = false;
                    }
                }
            }
            if (ok) {
                right[k] = warm->right[k];
            }
        }
        if (!ok) {
            detail::add_random_indices(right[k], std::min(opt.init_rank, max_rank), grid, k, d, rng);
        }
    }
    std::vector<bool> saturated(d + 1, false);
    std::vector<Core> cores(d);
    TensorTrain previous;
    bool have_previous = false;

    for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const bool forward = sweep % 2 == 0;
        bool any_saturated = false;
        if (forward) {
            for (std::size_t k = 0; k + 1 < d; ++k) {
                const std::size_t n = grid.count(k);
                std::vector<MultiIndex> cols = right[k + 1];
                const std::size_t kick = saturated[k + 1] ? std::max(opt.kick, cols.size()) : opt.kick;
                detail::add_random_indices(cols, kick, grid, k + 1, d, rng);
                const std::size_t rows = left[k].size() * n;
                auto vals = detail::cross_fibers(f, cache, d, k, n, left[k], cols);
                Eigen::Map<const RowMatrix> a(vals.data(), static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols.size()));
                Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeThinU);
                const double bound = std::min({static_cast<double>(max_rank), detail::capped_product(grid, 0, k + 1),
                                                detail::capped_product(grid, k + 1, d)});
                auto rc = detail::choose_rank(svd.singularValues(), rel_tol, opt.kick, max_rank, bound);
                saturated[k + 1] = rc.saturated;
                any_saturated = any_saturated || rc.saturated;
                RowMatrix u = svd.matrixU().leftCols(rc.rank);
                auto mv = maxvol(u);
                Core c(left[k].size(), n, static_cast<std::size_t>(rc.rank));
                c.left_unfolding() = mv.coefficients;
                cores[k] = std::move(c);
                std::vector<MultiIndex> next;
                next.reserve(mv.rows.size());
                for (std::size_t row : mv.rows) {
                    MultiIndex m = left[k][row / n];
                    m.push_back(static_cast<std::uint32_t>(row % n));
                    next.push_back(std::move(m));
                }
                left[k + 1] = std::move(next);
            }
            const std::size_t n = grid.count(d - 1);
            auto vals = detail::cross_fibers(f, cache, d, d - 1, n, left[d - 1], right[d]);
            Core c(left[d - 1].size(), n, 1);
            c.data = std::move(vals);
            cores[d - 1] = std::move(c);
        } else {
            for (std::size_t k = d - 1; k >= 1; --k) {
                const std::size_t n = grid.count(k);
                std::vector<MultiIndex> rowsets = left[k];
                const std::size_t kick = saturated[k] ? std::max(opt.kick, rowsets.size()) : opt.kick;
                detail::add_random_indices(rowsets, kick, grid, 0, k, rng);
                const std::size_t rr = right[k + 1].size();
                auto vals = detail::cross_fibers(f, cache, d, k, n, rowsets, right[k + 1]);
                // transpose to (i*rr + b) x a
                Eigen::MatrixXd at(static_cast<Eigen::Index>(n * rr), static_cast<Eigen::Index>(rowsets.size()));
                for (std::size_t a = 0; a < rowsets.size(); ++a) {
                    for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t b = 0; b < rr; ++b) {
                            at(static_cast<Eigen::Index>(i * rr + b), static_cast<Eigen::Index>(a)) =
                                vals[(a * n + i) * rr + b];
                        }
                    }
                }
                Eigen::BDCSVD<Eigen::MatrixXd> svd(at, Eigen::ComputeThinU);
                const double bound = std::min({static_cast<double>(max_rank), detail::capped_product(grid, 0, k),
                                                detail::capped_product(grid, k, d)});
                auto rc = detail::choose_rank(svd.singularValues(), rel_tol, opt.kick, max_rank, bound);
                saturated[k] = rc.saturated;
                any_saturated = any_saturated || rc.saturated;
                RowMatrix u = svd.matrixU().leftCols(rc.rank);
                auto mv = maxvol(u);
                Core c(static_cast<std::size_t>(rc.rank), n, rr);
                for (Eigen::Index a = 0; a < rc.rank; ++a) {
                    for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t b = 0; b < rr; ++b) {
                            c(static_cast<std::size_t>(a), i, b) =
                                mv.coefficients(static_cast<Eigen::Index>(i * rr + b), a);
                        }
                    }
                }
                cores[k] = std::move(c);
                std::vector<MultiIndex> next;
                next.reserve(mv.rows.size());
                for (std::size_t row : mv.rows) {
                    MultiIndex m;
                    m.reserve(d - k);
                    m.push_back(static_cast<std::uint32_t>(row / rr));
                    const auto& tail = right[k + 1][row % rr];
                    m.insert(m.end(), tail.begin(), tail.end());
                    next.push_back(std::move(m));
                }
                right[k] = std::move(next);
            }
            const std::size_t n = grid.count(0);
            auto vals = detail::cross_fibers(f, cache, d, 0, n, left[0], right[1]);
            Core c(1, n, right[1].size());
            c.data = std::move(vals);
            cores[0] = std::move(c);
        }
        TensorTrain current(cores, grid);
        res.sweeps = sweep + 1;
        if (have_previous) {
            res.change = tt_relative_distance(current, previous);
            if (res.change <= eps && res.sweeps >= opt.min_sweeps && !any_saturated) {
                previous = std::move(current);
                res.converged = true;
                break;
            }
        }
        previous = std::move(current);
        have_previous = true;
    }
    res.evaluations = cache.size();
    res.index_sets.right = right;
    res.tt = tt_round(previous, opt.round_factor * eps);
    return res;
}

/// Cross approximation of a function of real coordinates sampled on the grid.
inline CrossResult tt_cross(const std::function<double(const std::vector<double>&)>& f, const Grid& grid,
                            double eps, std::size_t max_rank, const CrossOptions& opt = {}) {
    IndexOracle g = [&](std::span<const std::uint32_t> idx) {
        std::vector<double> x(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            x[k] = grid.point(k, idx[k]);
        }
        return f(x);
    };
    return tt_cross_indexed(g, grid, eps, max_rank, opt);
}

} // namespace lspkit
