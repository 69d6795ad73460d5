#include "hmmorder/linalg.hpp"

#include "hmmorder/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>

extern "C" void openblas_set_num_threads(int);

namespace hmmorder::linalg {

void set_blas_threads(int threads) { openblas_set_num_threads(std::max(1, threads)); }

namespace {

SymmetricEigen lapack_symmetric_eigen(Eigen::MatrixXd a, bool want_vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    SymmetricEigen out;
    out.values.resize(n);
    if (n == 0) return out;
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, a.data(), n, out.values.data());
    if (info != 0) throw NumericError("dsyevd failed with info=" + std::to_string(info));
    if (want_vectors) out.vectors = std::move(a);
    return out;
}

Eigen::VectorXd lapack_singular_values(Eigen::MatrixXd a) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    Eigen::VectorXd s(std::min(m, n));
    if (s.size() == 0) return s;
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericError("dgesdd failed with info=" + std::to_string(info));
    return s;
}

bool run_self_check() {
    constexpr Eigen::Index n = 320;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = unif(rng);
    const Eigen::MatrixXd sym = x * x.transpose();
    const double scale = sym.norm();

    const SymmetricEigen e = lapack_symmetric_eigen(sym, true);
    const Eigen::MatrixXd recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    if (!recon.allFinite() || (recon - sym).norm() > 1e-10 * scale) return false;
    if ((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-10) return false;

    const Eigen::MatrixXd rect = x.leftCols(n - 20);
    const Eigen::VectorXd s = lapack_singular_values(rect);
    const Eigen::VectorXd ref = Eigen::BDCSVD<Eigen::MatrixXd>(rect).singularValues();
    return s.allFinite() && (s - ref).norm() <= 1e-10 * ref(0);
}

Backend choose_backend() {
    if (const char* env = std::getenv("HMM_ORDER_LINALG")) {
        if (std::strcmp(env, "eigen") == 0) return Backend::Eigen;
        if (std::strcmp(env, "lapack") == 0) return Backend::Lapack;
    }
    return lapack_self_check() ? Backend::Lapack : Backend::Eigen;
}

}  // namespace

bool lapack_self_check() {
    static const bool ok = [] {
        try {
            return run_self_check();
        } catch (const Error&) {
            return false;
        }
    }();
    return ok;
}

Backend backend() {
    static const Backend chosen = choose_backend();
    return chosen;
}

const char* to_string(Backend b) { return b == Backend::Lapack ? "lapack" : "eigen"; }

SymmetricEigen symmetric_eigen(Eigen::MatrixXd a, bool want_vectors) {
    if (a.rows() != a.cols()) throw ShapeError("symmetric_eigen: matrix is not square");
    if (backend() == Backend::Lapack) return lapack_symmetric_eigen(std::move(a), want_vectors);
    a.triangularView<Eigen::StrictlyLower>() = a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
    SymmetricEigen out;
    out.values = es.eigenvalues();
    if (want_vectors) out.vectors = es.eigenvectors();
    return out;
}

Eigen::VectorXd singular_values(Eigen::MatrixXd a) {
    if (backend() == Backend::Lapack) return lapack_singular_values(std::move(a));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
    return svd.singularValues();
}

Eigen::VectorXd top_singular_values(const Eigen::MatrixXd& a, Eigen::Index k, std::uint64_t seed, int max_iterations,
                                    double rel_tol) {
    const Eigen::Index n = a.cols();
    k = std::min(k, std::min(a.rows(), n));
    if (k <= 0) return Eigen::VectorXd();
    const Eigen::Index block = std::min(n, k + 10);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd q(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
        for (Eigen::Index i = 0; i < n; ++i) q(i, j) = normal(rng);
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, block);

    Eigen::VectorXd previous = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd current;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::MatrixXd z = a * q;
        current = singular_values(z).head(k);
        if (it > 0 && ((current - previous).array().abs() <= rel_tol * std::max(current(0), 1e-300)).all()) break;
        previous = current;
        const Eigen::MatrixXd y = a.transpose() * z;
        q = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() * Eigen::MatrixXd::Identity(n, block);
    }
    return current;
}

}  // namespace hmmorder::linalg
