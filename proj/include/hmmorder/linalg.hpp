#pragma once

#include <Eigen/Dense>

#include <cstdint>

// Thin wrappers over LAPACK drivers with an Eigen fallback. Inputs are taken by value
// because the drivers overwrite their arguments.
namespace hmmorder::linalg {

enum class Backend { Lapack, Eigen };

/// Backend in use. Chosen once per process: HMM_ORDER_LINALG=lapack|eigen forces it,
/// otherwise LAPACK is used when it passes a self-check against Eigen on a 320 x 320 problem.
Backend backend();
const char* to_string(Backend b);
/// Result of the LAPACK self-check (runs it on first call).
bool lapack_self_check();

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, empty when not requested
};

/// Eigendecomposition of a symmetric matrix (only the upper triangle is read).
SymmetricEigen symmetric_eigen(Eigen::MatrixXd a, bool want_vectors = true);

/// All singular values of a general matrix, nonincreasing.
Eigen::VectorXd singular_values(Eigen::MatrixXd a);

/// Pins the BLAS backend to a fixed thread count so results do not depend on scheduling.
void set_blas_threads(int threads);

/// Leading k singular values by randomized block subspace iteration on a^T a.
/// Deterministic for a fixed seed.
Eigen::VectorXd top_singular_values(const Eigen::MatrixXd& a, Eigen::Index k, std::uint64_t seed = 0x5eed,
                                    int max_iterations = 200, double rel_tol = 1e-12);

}  // namespace hmmorder::linalg
