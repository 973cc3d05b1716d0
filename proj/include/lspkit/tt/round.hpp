#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

namespace detail {

/// Smallest rank whose discarded singular tail has norm <= delta.
inline Eigen::Index truncation_rank(const Eigen::VectorXd& sigma, double delta) {
    Eigen::Index r = sigma.size();
    double tail = 0.0;
    while (r > 1) {
        const double s = sigma(r - 1);
        if (tail + s * s > delta * delta) {
            break;
        }
        tail += s * s;
        --r;
    }
    return r;
}

} // namespace detail

/// TT recompression: right-to-left orthogonalization followed by
/// left-to-right truncated SVDs with per-bond threshold eps/sqrt(d-1)*||A||.
inline TensorTrain tt_round(const TensorTrain& tt, double eps) {
    if (!(eps >= 0.0)) {
        throw ConfigError("tt_round: eps must be non-negative");
    }
    std::vector<Core> cores = tt.cores();
    const std::size_t d = cores.size();
    if (d == 1) {
        return tt;
    }
    for (std::size_t k = d - 1; k >= 1; --k) {
        Core& c = cores[k];
        // c = L * Q with Q row-orthonormal, via QR of the transpose
        Eigen::MatrixXd at = c.right_unfolding().transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
        const Eigen::Index m = std::min(at.rows(), at.cols());
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(at.rows(), m);
        Eigen::MatrixXd rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        Core nc(static_cast<std::size_t>(m), c.n, c.r1);
        nc.right_unfolding() = q.transpose();
        Core& p = cores[k - 1];
        Core np(p.r0, p.n, static_cast<std::size_t>(m));
        np.left_unfolding() = p.left_unfolding() * rr.transpose();
        c = std::move(nc);
        p = std::move(np);
    }
    const double norm = std::sqrt(cores[0].left_unfolding().squaredNorm());
    if (!std::isfinite(norm)) {
        throw NumericError("tt_round: non-finite tensor norm");
    }
    const double delta = eps / std::sqrt(static_cast<double>(d - 1)) * norm;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        Core& c = cores[k];
        Eigen::MatrixXd a = c.left_unfolding();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sigma = svd.singularValues();
        Eigen::Index r = detail::truncation_rank(sigma, delta);
        if (eps == 0.0) {
            r = sigma.size();
        }
        r = std::max<Eigen::Index>(1, r);
        Core nc(c.r0, c.n, static_cast<std::size_t>(r));
        nc.left_unfolding() = svd.matrixU().leftCols(r);
        Eigen::MatrixXd sv = sigma.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
        Core& nx = cores[k + 1];
        Core nn(static_cast<std::size_t>(r), nx.n, nx.r1);
        nn.right_unfolding() = sv * nx.right_unfolding();
        c = std::move(nc);
        nx = std::move(nn);
    }
    return TensorTrain(std::move(cores), tt.grid());
}

} // namespace lspkit
