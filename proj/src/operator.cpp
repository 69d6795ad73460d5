#include "hmmorder/operator.hpp"

#include "hmmorder/errors.hpp"
#include "hmmorder/linalg.hpp"
#include "hmmorder/low_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hmmorder {

namespace {

void check_entry(double value, Eigen::Index i, Eigen::Index j) {
    if (!std::isfinite(value))
        throw NumericError("non-finite kernel value for pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

}  // namespace

Eigen::MatrixXd build_gram(const ObservedSeries& series, const KernelSpec& kernel) {
    kernel.validate();
    if (kernel.dim != series.dim())
        throw ShapeError("kernel dimension " + std::to_string(kernel.dim) + " does not match series dimension " +
                         std::to_string(series.dim()));
    const Eigen::MatrixXd& y = series.points();
    const Eigen::Index n = y.rows();
    const Eigen::Index d = y.cols();
    Eigen::MatrixXd w(n, n);

    if (kernel.family == KernelFamily::Gaussian) {
        const double h = kernel.bandwidth;
        const double scale = std::pow(4.0 * std::numbers::pi * h * h, -0.5 * static_cast<double>(d));
        const double rate = 1.0 / (4.0 * h * h);
        const Eigen::MatrixXd yt = y.transpose();  // columns are points
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i <= j; ++i) {
                const double sq = (yt.col(i) - yt.col(j)).squaredNorm();
                const double value = scale * std::exp(-rate * sq);
                check_entry(value, i, j);
                w(i, j) = value;
            }
        }
    } else if (kernel.family == KernelFamily::VonMises) {
        const double kappa = kernel.von_mises_concentration();
        const double i0k = bessel_i0_scaled(kappa);
        const double norm = 1.0 / (2.0 * std::numbers::pi * i0k * i0k);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i <= j; ++i) {
                const double c = std::abs(std::cos(0.5 * (y(i, 0) - y(j, 0))));
                const double value = norm * bessel_i0_scaled(2.0 * kappa * c) * std::exp(2.0 * kappa * (c - 1.0));
                check_entry(value, i, j);
                w(i, j) = value;
            }
        }
    } else {
        std::vector<double> diff(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i <= j; ++i) {
                for (Eigen::Index k = 0; k < d; ++k) diff[static_cast<std::size_t>(k)] = y(i, k) - y(j, k);
                const double value = cross_gram_diff(kernel, diff);
                check_entry(value, i, j);
                w(i, j) = value;
            }
        }
    }
    // mirror so the matrix is symmetric bit for bit
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) w(i, j) = w(j, i);
    return w;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& w, double tol) {
    if (w.rows() != w.cols()) throw ShapeError("psd_sqrt: matrix is not square");
    const Eigen::Index n = w.rows();
    if (n == 0) return w;
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw ShapeError("psd_sqrt: matrix is not symmetric");

    auto eig = linalg::symmetric_eigen(w, true);
    const double lambda_max = eig.values(n - 1);
    const double floor = -tol * std::max(1.0, lambda_max);
    if (eig.values(0) < floor)
        throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(eig.values(0)) + " below the floor " +
                          std::to_string(floor));
    // Q sqrt(L) Q^T = B B^T with B = Q L^{1/4}
    const Eigen::VectorXd quarter = eig.values.cwiseMax(0.0).cwiseSqrt().cwiseSqrt();
    const Eigen::MatrixXd b = eig.vectors * quarter.asDiagonal();
    Eigen::MatrixXd m = b * b.transpose();
    // B B^T is symmetric only up to rounding in the product kernel
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) m(i, j) = m(j, i);
    return m;
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, std::span<const Eigen::Index> idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd out(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index cj = idx[static_cast<std::size_t>(j)];
        if (cj < 0 || cj >= m.cols()) throw ShapeError("selector index out of range");
        for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m(idx[static_cast<std::size_t>(i)], cj);
    }
    return out;
}

Eigen::MatrixXd build_v(const Eigen::MatrixXd& root, const PairSelectors& sel) {
    if (root.rows() != root.cols()) throw ShapeError("build_v: root is not square");
    const auto n = static_cast<double>(sel.size());
    if (sel.size() == 0) throw ShapeError("build_v: no pairs");
    const Eigen::MatrixXd second = principal_submatrix(root, sel.second);
    const Eigen::MatrixXd first = principal_submatrix(root, sel.first);
    return (second * first) / n;
}

Eigen::MatrixXd build_v_from_roots(const Eigen::MatrixXd& root_first, const Eigen::MatrixXd& root_second) {
    if (root_first.rows() != root_second.rows() || root_first.rows() != root_first.cols() ||
        root_second.rows() != root_second.cols())
        throw ShapeError("build_v_from_roots: roots must be square and of equal size");
    if (root_first.rows() == 0) throw ShapeError("build_v_from_roots: no pairs");
    return (root_second * root_first) / static_cast<double>(root_first.rows());
}

SingularSpectrum singular_spectrum(const Eigen::MatrixXd& v, std::size_t l_max, std::size_t full_svd_limit) {
    if (l_max < 1) throw DomainError("singular_spectrum: l_max must be >= 1");
    SingularSpectrum out;
    out.n_pairs = static_cast<std::size_t>(std::min(v.rows(), v.cols()));
    out.frob_sq = v.squaredNorm();
    const auto keep = static_cast<Eigen::Index>(std::min(l_max, out.n_pairs));
    Eigen::VectorXd s;
    if (out.n_pairs <= full_svd_limit) {
        s = linalg::singular_values(v);
    } else {
        s = linalg::top_singular_values(v, keep);
    }
    if (!s.allFinite()) throw NumericError("singular_spectrum: non-finite singular value");
    out.sigma.assign(s.data(), s.data() + keep);
    std::sort(out.sigma.begin(), out.sigma.end(), std::greater<>());
    return out;
}

OperatorResult estimate_operator_matrix(const ObservedSeries& series, const KernelSpec& kernel, std::size_t l_max,
                                        const OperatorOptions& options) {
    OperatorResult result;
    GramArtifacts& art = result.artifacts;
    art.bandwidth = kernel.bandwidth;
    art.form = options.form;
    const PairSelectors sel = build_selectors(series);

    if (options.low_rank > 0) {
        const LowRankGram factor = low_rank_gram(series, kernel, options.low_rank, options.low_rank_tolerance);
        result.spectrum = low_rank_spectrum(factor, sel, l_max);
        return result;
    }

    art.gram = build_gram(series, kernel);
    if (options.form == PairMatrixForm::SubmatrixRoots) {
        art.root_first = psd_sqrt(principal_submatrix(art.gram, sel.first), options.psd_tolerance);
        art.root_second = psd_sqrt(principal_submatrix(art.gram, sel.second), options.psd_tolerance);
        art.pair_matrix = build_v_from_roots(art.root_first, art.root_second);
    } else {
        art.full_root = psd_sqrt(art.gram, options.psd_tolerance);
        art.pair_matrix = build_v(art.full_root, sel);
    }
    result.spectrum = singular_spectrum(art.pair_matrix, l_max, options.full_svd_limit);
    return result;
}

SingularSpectrum operator_spectrum(const ObservedSeries& series, const KernelSpec& kernel, std::size_t l_max,
                                   const OperatorOptions& options) {
    const PairSelectors sel = build_selectors(series);
    if (options.low_rank > 0) {
        const LowRankGram factor = low_rank_gram(series, kernel, options.low_rank, options.low_rank_tolerance);
        return low_rank_spectrum(factor, sel, l_max);
    }
    Eigen::MatrixXd v;
    {
        const Eigen::MatrixXd gram = build_gram(series, kernel);
        if (options.form == PairMatrixForm::SubmatrixRoots) {
            const Eigen::MatrixXd first = psd_sqrt(principal_submatrix(gram, sel.first), options.psd_tolerance);
            const Eigen::MatrixXd second = psd_sqrt(principal_submatrix(gram, sel.second), options.psd_tolerance);
            v = build_v_from_roots(first, second);
        } else {
            v = build_v(psd_sqrt(gram, options.psd_tolerance), sel);
        }
    }
    return singular_spectrum(v, l_max, options.full_svd_limit);
}

}  // namespace hmmorder
