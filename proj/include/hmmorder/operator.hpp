#pragma once

#include "hmmorder/kernels.hpp"
#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace hmmorder {

/// How the n x n pair matrix is assembled from the Gram matrix W.
enum class PairMatrixForm {
    /// (1/n) (W[second,second])^{1/2} (W[first,first])^{1/2}. Its singular values are
    /// exactly those of the empirical smoothed operator.
    SubmatrixRoots,
    /// (1/n) M[second,second] M[first,first] with M = W^{1/2}: principal blocks of the
    /// root of the full Gram matrix. Only approximates the operator spectrum.
    FullRootBlocks,
};

/// Relative floor for negative eigenvalues in psd_sqrt: an eigenvalue below
/// -tol * max(1, lambda_max) is reported as NotPsdError, anything above is clamped to 0.
inline constexpr double kDefaultPsdTolerance = 1e-10;

/// Matrices built along the way. Which roots are filled depends on the PairMatrixForm.
struct GramArtifacts {
    Eigen::MatrixXd gram;         // W, N x N
    Eigen::MatrixXd root_first;   // (W[first,first])^{1/2}    (SubmatrixRoots)
    Eigen::MatrixXd root_second;  // (W[second,second])^{1/2}  (SubmatrixRoots)
    Eigen::MatrixXd full_root;    // W^{1/2}                   (FullRootBlocks)
    Eigen::MatrixXd pair_matrix;  // V, n x n
    double bandwidth = 0.0;
    PairMatrixForm form = PairMatrixForm::SubmatrixRoots;
};

/// Leading singular values of V together with its squared Frobenius norm, so that
/// tail sums need no full decomposition.
struct SingularSpectrum {
    std::vector<double> sigma;  // nonincreasing
    double frob_sq = 0.0;
    std::size_t n_pairs = 0;

    /// True when sigma holds every singular value (sigma.size() == n_pairs).
    bool complete() const { return sigma.size() == n_pairs; }
};

struct OperatorOptions {
    PairMatrixForm form = PairMatrixForm::SubmatrixRoots;
    double psd_tolerance = kDefaultPsdTolerance;
    /// Above this n, a truncated iterative SVD replaces the full one.
    std::size_t full_svd_limit = 4000;
    /// When nonzero, the Gram matrix is replaced by a pivoted low-rank factor of this rank.
    std::size_t low_rank = 0;
    double low_rank_tolerance = 1e-12;
};

/// W[i,j] = cross_gram(y_i, y_j); the upper triangle is computed and mirrored.
Eigen::MatrixXd build_gram(const ObservedSeries& series, const KernelSpec& kernel);

/// Symmetric PSD square root by eigendecomposition with negative eigenvalues clamped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& w, double tol = kDefaultPsdTolerance);

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, std::span<const Eigen::Index> idx);

/// (1/n) M[second,second] M[first,first] for a given root M of the full Gram matrix.
Eigen::MatrixXd build_v(const Eigen::MatrixXd& root, const PairSelectors& sel);

/// (1/n) root_second * root_first for precomputed roots of the principal submatrices.
Eigen::MatrixXd build_v_from_roots(const Eigen::MatrixXd& root_first, const Eigen::MatrixXd& root_second);

/// Top min(l_max, n) singular values of V and ||V||_F^2.
SingularSpectrum singular_spectrum(const Eigen::MatrixXd& v, std::size_t l_max, std::size_t full_svd_limit = 4000);

struct OperatorResult {
    GramArtifacts artifacts;
    SingularSpectrum spectrum;
};

/// build_gram -> roots -> build_selectors -> pair matrix -> singular_spectrum.
OperatorResult estimate_operator_matrix(const ObservedSeries& series, const KernelSpec& kernel, std::size_t l_max,
                                        const OperatorOptions& options = {});

/// Same spectrum as estimate_operator_matrix without retaining the intermediate matrices.
SingularSpectrum operator_spectrum(const ObservedSeries& series, const KernelSpec& kernel, std::size_t l_max,
                                   const OperatorOptions& options = {});

}  // namespace hmmorder
