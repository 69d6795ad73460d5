#include "hmmorder/low_rank.hpp"

#include "hmmorder/errors.hpp"
#include "hmmorder/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hmmorder {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const Eigen::Index> rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

struct ThinSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
};

ThinSvd thin_svd(const Eigen::MatrixXd& f) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
}

}  // namespace

LowRankGram pivoted_cholesky(Eigen::Index n, const std::function<double(Eigen::Index, Eigen::Index)>& entry,
                             std::size_t rank, double tol) {
    LowRankGram out;
    const Eigen::Index target = std::min<Eigen::Index>(static_cast<Eigen::Index>(rank), n);
    Eigen::VectorXd diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = entry(i, i);
    const double max0 = n > 0 ? diag.maxCoeff() : 0.0;
    out.factor.resize(n, target);

    Eigen::Index r = 0;
    for (; r < target; ++r) {
        Eigen::Index p = 0;
        const double pivot = diag.maxCoeff(&p);
        if (!(pivot > tol * max0)) break;
        Eigen::VectorXd col(n);
        for (Eigen::Index i = 0; i < n; ++i) col(i) = entry(i, p);
        if (r > 0) col.noalias() -= out.factor.leftCols(r) * out.factor.row(p).head(r).transpose();
        out.factor.col(r) = col / std::sqrt(pivot);
        diag -= out.factor.col(r).cwiseAbs2();
        diag(p) = 0.0;
        diag = diag.cwiseMax(0.0);
        out.pivots.push_back(p);
    }
    out.factor.conservativeResize(n, r);
    out.residual_trace = diag.sum();
    if (r < static_cast<Eigen::Index>(rank)) {
        out.truncated = true;
        out.warning = "requested rank " + std::to_string(rank) + " exceeds the numerical rank " + std::to_string(r) +
                      "; factor truncated";
    }
    return out;
}

LowRankGram low_rank_gram(const Eigen::MatrixXd& w, std::size_t rank, double tol) {
    if (w.rows() != w.cols()) throw ShapeError("low_rank_gram: matrix is not square");
    return pivoted_cholesky(w.rows(), [&w](Eigen::Index i, Eigen::Index j) { return w(i, j); }, rank, tol);
}

LowRankGram low_rank_gram(const ObservedSeries& series, const KernelSpec& kernel, std::size_t rank, double tol) {
    kernel.validate();
    if (kernel.dim != series.dim()) throw ShapeError("low_rank_gram: kernel and series dimensions differ");
    const Eigen::MatrixXd& y = series.points();
    std::vector<double> diff(series.dim());
    auto entry = [&](Eigen::Index i, Eigen::Index j) {
        for (Eigen::Index k = 0; k < y.cols(); ++k) diff[static_cast<std::size_t>(k)] = y(i, k) - y(j, k);
        return cross_gram_diff(kernel, diff);
    };
    return pivoted_cholesky(y.rows(), entry, rank, tol);
}

LowRankRoot low_rank_sqrt(const Eigen::MatrixXd& w, std::size_t rank, double tol) {
    if (rank >= static_cast<std::size_t>(w.rows()) + 1)
        throw DomainError("low_rank_sqrt: rank must not exceed the matrix size");
    const LowRankGram gram = low_rank_gram(w, rank, tol);
    LowRankRoot root;
    root.truncated = gram.truncated;
    root.warning = gram.warning;
    // F F^T = U S^2 U^T, so U S U^T is a root of the approximation
    const ThinSvd svd = thin_svd(gram.factor);
    root.basis = svd.u;
    root.values = svd.s;
    root.reconstruction_error = (gram.factor * gram.factor.transpose() - w).norm();
    return root;
}

Eigen::MatrixXd build_v(const LowRankRoot& root, const PairSelectors& sel) {
    if (sel.size() == 0) throw ShapeError("build_v: no pairs");
    const Eigen::MatrixXd u_first = select_rows(root.basis, sel.first);
    const Eigen::MatrixXd u_second = select_rows(root.basis, sel.second);
    const Eigen::MatrixXd m_second = u_second * root.values.asDiagonal() * u_second.transpose();
    const Eigen::MatrixXd m_first = u_first * root.values.asDiagonal() * u_first.transpose();
    return (m_second * m_first) / static_cast<double>(sel.size());
}

SingularSpectrum low_rank_spectrum(const LowRankGram& gram, const PairSelectors& sel, std::size_t l_max) {
    if (l_max < 1) throw DomainError("low_rank_spectrum: l_max must be >= 1");
    if (sel.size() == 0) throw ShapeError("low_rank_spectrum: no pairs");
    const ThinSvd first = thin_svd(select_rows(gram.factor, sel.first));
    const ThinSvd second = thin_svd(select_rows(gram.factor, sel.second));
    // (1/n) P2 S2 P2^T P1 S1 P1^T shares its nonzero singular values with this r x r core
    const Eigen::MatrixXd core = second.s.asDiagonal() * (second.u.transpose() * first.u) * first.s.asDiagonal() /
                                 static_cast<double>(sel.size());

    SingularSpectrum out;
    out.n_pairs = sel.size();
    out.frob_sq = core.squaredNorm();
    const Eigen::VectorXd s = linalg::singular_values(core);
    const std::size_t keep = std::min(l_max, out.n_pairs);
    out.sigma.assign(keep, 0.0);
    for (std::size_t i = 0; i < keep && static_cast<Eigen::Index>(i) < s.size(); ++i)
        out.sigma[i] = s(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace hmmorder
