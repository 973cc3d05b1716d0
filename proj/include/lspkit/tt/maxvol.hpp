#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

struct MaxvolResult {
    std::vector<std::size_t> rows;
    RowMatrix coefficients; // A * inv(A[rows, :]), identity on the chosen rows
};

/// Rank-1 update of B = A * inv(A[rows]) after row j of the submatrix is
/// replaced by row i of A.
inline void maxvol_swap_update(RowMatrix& b, Eigen::Index i, Eigen::Index j) {
    const double pivot = b(i, j);
    Eigen::VectorXd col = b.col(j);
    Eigen::RowVectorXd row = b.row(i);
    row(j) -= 1.0;
    b.noalias() -= (col * row) / pivot;
}

/// Quasi-maximal-volume r x r submatrix of a tall n x r matrix.
inline MaxvolResult maxvol(const RowMatrix& a, double tol = 1.05, int max_swaps = 1000) {
    const auto n = a.rows();
    const auto r = a.cols();
    if (r == 0 || n < r) {
        throw NumericError("maxvol: need a tall matrix with at least one column");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    const auto& perm = qr.colsPermutation().indices();
    MaxvolResult res;
    res.rows.resize(static_cast<std::size_t>(r));
    RowMatrix sub(r, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        res.rows[static_cast<std::size_t>(j)] = static_cast<std::size_t>(perm(j));
        sub.row(j) = a.row(perm(j));
    }
    Eigen::PartialPivLU<RowMatrix> lu(sub);
    res.coefficients = a * lu.inverse();
    if (!res.coefficients.allFinite()) {
        throw NumericError("maxvol: singular starting submatrix");
    }
    for (int it = 0; it < max_swaps; ++it) {
        Eigen::Index i = 0;
        Eigen::Index j = 0;
        const double m = res.coefficients.cwiseAbs().maxCoeff(&i, &j);
        if (m <= tol) {
            break;
        }
        maxvol_swap_update(res.coefficients, i, j);
        res.rows[static_cast<std::size_t>(j)] = static_cast<std::size_t>(i);
    }
    return res;
}

} // namespace lspkit
