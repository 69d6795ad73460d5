#pragma once

#include "hmmorder/kernels.hpp"
#include "hmmorder/operator.hpp"
#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace hmmorder {

/// W ~= F F^T from a diagonally pivoted partial Cholesky factorization, which is
/// adaptive cross approximation specialised to symmetric PSD matrices: every step
/// picks the largest residual diagonal entry and adds the matching cross.
struct LowRankGram {
    Eigen::MatrixXd factor;             // N x r, r <= requested rank
    std::vector<Eigen::Index> pivots;   // selected rows/columns, in order
    double residual_trace = 0.0;        // trace(W - F F^T) >= 0
    bool truncated = false;             // stopped before the requested rank
    std::string warning;

    Eigen::Index rank() const { return factor.cols(); }
};

/// Factor from matrix entries supplied on demand; W is never formed.
LowRankGram pivoted_cholesky(Eigen::Index n, const std::function<double(Eigen::Index, Eigen::Index)>& entry,
                             std::size_t rank, double tol);

LowRankGram low_rank_gram(const Eigen::MatrixXd& w, std::size_t rank, double tol = 1e-12);
LowRankGram low_rank_gram(const ObservedSeries& series, const KernelSpec& kernel, std::size_t rank,
                          double tol = 1e-12);

/// Rank-r approximation of W^{1/2} as U diag(s) U^T.
struct LowRankRoot {
    Eigen::MatrixXd basis;           // N x r, orthonormal columns
    Eigen::VectorXd values;          // r
    double reconstruction_error = 0.0;  // ||M M - W||_F
    bool truncated = false;
    std::string warning;

    Eigen::MatrixXd dense() const { return basis * values.asDiagonal() * basis.transpose(); }
};

LowRankRoot low_rank_sqrt(const Eigen::MatrixXd& w, std::size_t rank, double tol = 1e-12);

/// (1/n) M[second,second] M[first,first] with M given in low-rank form.
Eigen::MatrixXd build_v(const LowRankRoot& root, const PairSelectors& sel);

/// Spectrum of the submatrix-root pair matrix for W ~= F F^T, computed through an
/// r x r core that has the same nonzero singular values.
SingularSpectrum low_rank_spectrum(const LowRankGram& gram, const PairSelectors& sel, std::size_t l_max);

}  // namespace hmmorder
