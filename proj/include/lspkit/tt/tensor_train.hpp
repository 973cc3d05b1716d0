#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lspkit/tt/grid.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Third-order core r0 x n x r1, entry (a, i, b) stored at (a*n + i)*r1 + b.
struct Core {
    std::size_t r0 = 1;
    std::size_t n = 1;
    std::size_t r1 = 1;
    std::vector<double> data;

    Core() = default;
    Core(std::size_t r0_, std::size_t n_, std::size_t r1_)
        : r0(r0_), n(n_), r1(r1_), data(r0_ * n_ * r1_, 0.0) {}

    double& operator()(std::size_t a, std::size_t i, std::size_t b) { return data[(a * n + i) * r1 + b]; }
    double operator()(std::size_t a, std::size_t i, std::size_t b) const {
        return data[(a * n + i) * r1 + b];
    }

    /// Slice i as an r0 x r1 view.
    auto slice(std::size_t i) const {
        return Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>(data.data() + i * r1,
                                                                   static_cast<Eigen::Index>(r0),
                                                                   static_cast<Eigen::Index>(r1),
                                                                   Eigen::OuterStride<>(n * r1));
    }

    /// (r0*n) x r1 unfolding.
    auto left_unfolding() const {
        return Eigen::Map<const RowMatrix>(data.data(), static_cast<Eigen::Index>(r0 * n),
                                           static_cast<Eigen::Index>(r1));
    }
    auto left_unfolding() {
        return Eigen::Map<RowMatrix>(data.data(), static_cast<Eigen::Index>(r0 * n),
                                     static_cast<Eigen::Index>(r1));
    }
    /// r0 x (n*r1) unfolding.
    auto right_unfolding() const {
        return Eigen::Map<const RowMatrix>(data.data(), static_cast<Eigen::Index>(r0),
                                           static_cast<Eigen::Index>(n * r1));
    }
    auto right_unfolding() {
        return Eigen::Map<RowMatrix>(data.data(), static_cast<Eigen::Index>(r0),
                                     static_cast<Eigen::Index>(n * r1));
    }
};

class TensorTrain {
public:
    TensorTrain() = default;

    TensorTrain(std::vector<Core> cores, Grid grid) : cores_(std::move(cores)), grid_(std::move(grid)) {
        validate();
    }

    std::size_t dims() const { return cores_.size(); }
    const Grid& grid() const { return grid_; }
    const std::vector<Core>& cores() const { return cores_; }
    const Core& core(std::size_t k) const { return cores_[k]; }

    /// Bond ranks r_0..r_d.
    std::vector<std::size_t> ranks() const {
        std::vector<std::size_t> r;
        r.reserve(cores_.size() + 1);
        for (const auto& c : cores_) {
            r.push_back(c.r0);
        }
        r.push_back(cores_.empty() ? 1 : cores_.back().r1);
        return r;
    }

    std::size_t max_rank() const {
        std::size_t m = 1;
        for (std::size_t r : ranks()) {
            m = std::max(m, r);
        }
        return m;
    }

private:
    void validate() const {
        if (cores_.empty()) {
            throw ConfigError("tensor train needs at least one core");
        }
        if (cores_.size() != grid_.dims()) {
            throw ConfigError("tensor train: core count does not match grid dimensions");
        }
        if (cores_.front().r0 != 1 || cores_.back().r1 != 1) {
            throw ConfigError("tensor train: boundary ranks must be 1");
        }
        for (std::size_t k = 0; k < cores_.size(); ++k) {
            const Core& c = cores_[k];
            if (c.data.size() != c.r0 * c.n * c.r1) {
                throw ConfigError("tensor train: core " + std::to_string(k) + " has wrong size");
            }
            if (c.n != grid_.count(k)) {
                throw ConfigError("tensor train: mode size of core " + std::to_string(k) +
                                  " differs from grid");
            }
            if (k + 1 < cores_.size() && c.r1 != cores_[k + 1].r0) {
                throw ConfigError("tensor train: rank mismatch between cores " + std::to_string(k) +
                                  " and " + std::to_string(k + 1));
            }
        }
    }

    std::vector<Core> cores_;
    Grid grid_;
};

/// Value at a grid multi-index.
inline double tt_evaluate(const TensorTrain& tt, std::span<const std::size_t> index) {
    const std::size_t d = tt.dims();
    if (index.size() != d) {
        throw BoundsError("index has " + std::to_string(index.size()) + " entries, expected " +
                          std::to_string(d));
    }
    std::vector<double> v{1.0};
    std::vector<double> w;
    for (std::size_t k = 0; k < d; ++k) {
        const Core& c = tt.core(k);
        if (index[k] >= c.n) {
            throw BoundsError("index " + std::to_string(index[k]) + " out of range [0, " +
                              std::to_string(c.n) + ") in dimension " + std::to_string(k));
        }
        w.assign(c.r1, 0.0);
        const double* base = c.data.data() + index[k] * c.r1;
        for (std::size_t a = 0; a < c.r0; ++a) {
            const double va = v[a];
            const double* row = base + a * c.n * c.r1;
            for (std::size_t b = 0; b < c.r1; ++b) {
                w[b] += va * row[b];
            }
        }
        v.swap(w);
    }
    return v[0];
}

inline double tt_evaluate(const TensorTrain& tt, std::initializer_list<std::size_t> index) {
    std::vector<std::size_t> idx(index);
    return tt_evaluate(tt, std::span<const std::size_t>(idx));
}

/// Multilinear interpolation; exact at nodes, no extrapolation.
template <class Point>
double tt_interpolate(const TensorTrain& tt, const Point& point) {
    const std::size_t d = tt.dims();
    if (static_cast<std::size_t>(point.size()) != d) {
        throw DomainError("point has " + std::to_string(point.size()) + " coordinates, expected " +
                          std::to_string(d));
    }
    const Grid& g = tt.grid();
    // small fixed buffers avoid allocation in hot loops
    thread_local std::vector<double> v;
    thread_local std::vector<double> w;
    v.assign(1, 1.0);
    for (std::size_t k = 0; k < d; ++k) {
        const Core& c = tt.core(k);
        std::size_t i;
        double t;
        g.locate(k, static_cast<double>(point[k]), i, t);
        w.assign(c.r1, 0.0);
        const std::size_t stride = c.n * c.r1;
        if (t == 0.0 || t == 1.0) {
            const double* base = c.data.data() + (i + (t == 1.0 ? 1 : 0)) * c.r1;
            for (std::size_t a = 0; a < c.r0; ++a) {
                const double va = v[a];
                const double* row = base + a * stride;
                for (std::size_t b = 0; b < c.r1; ++b) {
                    w[b] += va * row[b];
                }
            }
        } else {
            const double s = 1.0 - t;
            const double* base = c.data.data() + i * c.r1;
            for (std::size_t a = 0; a < c.r0; ++a) {
                const double va0 = v[a] * s;
                const double va1 = v[a] * t;
                const double* row0 = base + a * stride;
                const double* row1 = row0 + c.r1;
                for (std::size_t b = 0; b < c.r1; ++b) {
                    w[b] += va0 * row0[b] + va1 * row1[b];
                }
            }
        }
        v.swap(w);
    }
    return v[0];
}

inline double tt_interpolate(const TensorTrain& tt, std::initializer_list<double> point) {
    std::vector<double> p(point);
    return tt_interpolate(tt, p);
}

/// Interpolated values on the product of per-dimension coordinate lists,
/// row-major over the lists (last dimension fastest).
inline std::vector<double> tt_interpolate_product(const TensorTrain& tt,
                                                  const std::vector<std::vector<double>>& coords) {
    const std::size_t d = tt.dims();
    if (coords.size() != d) {
        throw DomainError("product interpolation: wrong number of coordinate lists");
    }
    const Grid& g = tt.grid();
    RowMatrix m = RowMatrix::Ones(1, 1);
    for (std::size_t k = 0; k < d; ++k) {
        const Core& c = tt.core(k);
        const std::size_t q = coords[k].size();
        const auto r1 = static_cast<Eigen::Index>(c.r1);
        RowMatrix next(m.rows() * static_cast<Eigen::Index>(q), r1);
        for (std::size_t j = 0; j < q; ++j) {
            std::size_t i;
            double t;
            g.locate(k, coords[k][j], i, t);
            RowMatrix s = (1.0 - t) * c.slice(i);
            if (t > 0.0) {
                s += t * c.slice(i + 1);
            }
            RowMatrix part = m * s;
            for (Eigen::Index p = 0; p < m.rows(); ++p) {
                next.row(p * static_cast<Eigen::Index>(q) + static_cast<Eigen::Index>(j)) = part.row(p);
            }
        }
        m.swap(next);
    }
    return std::vector<double>(m.data(), m.data() + m.rows());
}

/// Inner product of two tensor trains with equal mode sizes.
inline double tt_dot(const TensorTrain& a, const TensorTrain& b) {
    if (a.dims() != b.dims()) {
        throw ConfigError("tt_dot: dimension mismatch");
    }
    RowMatrix phi = RowMatrix::Ones(1, 1);
    for (std::size_t k = 0; k < a.dims(); ++k) {
        const Core& ca = a.core(k);
        const Core& cb = b.core(k);
        if (ca.n != cb.n) {
            throw ConfigError("tt_dot: mode size mismatch");
        }
        RowMatrix next = RowMatrix::Zero(static_cast<Eigen::Index>(ca.r1), static_cast<Eigen::Index>(cb.r1));
        for (std::size_t i = 0; i < ca.n; ++i) {
            next.noalias() += ca.slice(i).transpose() * (phi * cb.slice(i));
        }
        phi.swap(next);
    }
    return phi(0, 0);
}

inline double tt_norm(const TensorTrain& a) { return std::sqrt(std::max(0.0, tt_dot(a, a))); }

/// Relative Frobenius distance ||a - b|| / ||a||.
inline double tt_relative_distance(const TensorTrain& a, const TensorTrain& b) {
    const double aa = tt_dot(a, a);
    const double bb = tt_dot(b, b);
    const double ab = tt_dot(a, b);
    const double diff = std::sqrt(std::max(0.0, aa - 2.0 * ab + bb));
    const double na = std::sqrt(std::max(0.0, aa));
    return na > 0.0 ? diff / na : diff;
}

/// Total number of entries, saturating.
inline double tt_size(const TensorTrain& tt) {
    double s = 1.0;
    for (std::size_t k = 0; k < tt.dims(); ++k) {
        s *= static_cast<double>(tt.core(k).n);
    }
    return s;
}

/// Dense row-major tabulation; only for small tensors.
inline std::vector<double> tt_full(const TensorTrain& tt) {
    if (tt_size(tt) > 5e7) {
        throw ConfigError("tt_full: tensor too large to tabulate");
    }
    RowMatrix m = RowMatrix::Ones(1, 1);
    for (std::size_t k = 0; k < tt.dims(); ++k) {
        const Core& c = tt.core(k);
        RowMatrix next(m.rows() * static_cast<Eigen::Index>(c.n), static_cast<Eigen::Index>(c.r1));
        for (std::size_t i = 0; i < c.n; ++i) {
            RowMatrix part = m * c.slice(i);
            for (Eigen::Index p = 0; p < m.rows(); ++p) {
                next.row(p * static_cast<Eigen::Index>(c.n) + static_cast<Eigen::Index>(i)) = part.row(p);
            }
        }
        m.swap(next);
    }
    return std::vector<double>(m.data(), m.data() + m.rows());
}

} // namespace lspkit
