#include "hmmorder/quadrature.hpp"

#include "hmmorder/errors.hpp"
#include "hmmorder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hmmorder::quadrature {

Grid line_grid(double lo, double hi, Eigen::Index size) {
    if (size < 2 || !(hi > lo)) throw DomainError("line_grid: need at least two nodes on a nonempty interval");
    Grid g;
    g.nodes = Eigen::VectorXd::LinSpaced(size, lo, hi);
    g.weight = (hi - lo) / static_cast<double>(size - 1);
    g.periodic = false;
    return g;
}

Grid circle_grid(Eigen::Index size) {
    if (size < 2) throw DomainError("circle_grid: need at least two nodes");
    Grid g;
    g.weight = 2.0 * std::numbers::pi / static_cast<double>(size);
    g.nodes.resize(size);
    for (Eigen::Index i = 0; i < size; ++i) g.nodes(i) = g.weight * static_cast<double>(i);
    g.periodic = true;
    return g;
}

QuadratureOperator::QuadratureOperator(Grid grid, Eigen::MatrixXd density)
    : grid_(std::move(grid)), density_(std::move(density)) {
    if (density_.rows() != grid_.size() || density_.cols() != grid_.size())
        throw ShapeError("QuadratureOperator: density does not match the grid");
}

Eigen::VectorXd QuadratureOperator::singular_values() const {
    // Equal weights: the symmetrised discretisation sqrt(w) P sqrt(w) is w P.
    // Trapezoid end weights are negligible because every integrand vanishes at the ends.
    return linalg::singular_values(grid_.weight * density_);
}

double QuadratureOperator::total_mass() const { return density_.sum() * grid_.weight * grid_.weight; }

Grid grid_for(const ObservedSeries& series, const KernelSpec& kernel, Eigen::Index size, double pad_bandwidths) {
    if (series.dim() != 1) throw ShapeError("quadrature grids are univariate");
    if (kernel.family == KernelFamily::VonMises) return circle_grid(size);
    const auto col = series.points().col(0);
    const double pad = pad_bandwidths * kernel.bandwidth;
    return line_grid(col.minCoeff() - pad, col.maxCoeff() + pad, size);
}

namespace {

Eigen::MatrixXd kernel_columns(const ObservedSeries& series, const KernelSpec& kernel, const Grid& grid,
                               std::span<const Eigen::Index> rows) {
    const auto& y = series.points();
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), grid.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            k(static_cast<Eigen::Index>(t), i) = scaled_kernel_eval(kernel, grid.nodes(i) - y(rows[t], 0));
    return k;
}

Grid coarsened(const Grid& g) {
    if (g.periodic) {
        if (g.size() % 2 != 0) throw OracleResolutionError("periodic oracle grids need an even number of nodes");
        return circle_grid(g.size() / 2);
    }
    if (g.size() % 2 == 0) throw OracleResolutionError("line oracle grids need an odd number of nodes");
    return line_grid(g.nodes(0), g.nodes(g.size() - 1), (g.size() + 1) / 2);
}

}  // namespace

QuadratureOperator empirical_pair_operator(const ObservedSeries& series, const KernelSpec& kernel, const Grid& grid) {
    if (series.dim() != 1 || kernel.dim != 1) throw ShapeError("empirical_pair_operator is univariate");
    const PairSelectors sel = build_selectors(series);
    const Eigen::MatrixXd k1 = kernel_columns(series, kernel, grid, sel.first);
    const Eigen::MatrixXd k2 = kernel_columns(series, kernel, grid, sel.second);
    Eigen::MatrixXd density = (k1.transpose() * k2) / static_cast<double>(sel.size());
    return {grid, std::move(density)};
}

std::vector<double> quadrature_svd_oracle(const ObservedSeries& series, const KernelSpec& kernel,
                                          Eigen::Index grid_size, std::size_t count, double resolution_tol) {
    if (grid_size < 200) throw OracleResolutionError("quadrature oracle needs at least 200 grid nodes");
    const Grid fine = grid_for(series, kernel, grid_size);
    const Eigen::VectorXd s_fine = empirical_pair_operator(series, kernel, fine).singular_values();
    const Eigen::VectorXd s_coarse = empirical_pair_operator(series, kernel, coarsened(fine)).singular_values();

    const std::size_t keep = std::min<std::size_t>(count, static_cast<std::size_t>(s_fine.size()));
    std::vector<double> out(keep);
    for (std::size_t j = 0; j < keep; ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        const double gap = std::abs(s_fine(i) - s_coarse(i));
        if (gap > resolution_tol * s_fine(i) + 1e-12 * s_fine(0))
            throw OracleResolutionError("quadrature grid too coarse: singular value " + std::to_string(j + 1) +
                                        " moved by " + std::to_string(gap) + " under halving");
        out[j] = s_fine(i);
    }
    return out;
}

GaussianPairDensity::GaussianPairDensity(Eigen::MatrixXd transition, Eigen::VectorXd stationary, Eigen::VectorXd means,
                                         Eigen::VectorXd sds)
    : transition_(std::move(transition)), stationary_(std::move(stationary)), means_(std::move(means)),
      sds_(std::move(sds)) {
    const Eigen::Index l = means_.size();
    if (transition_.rows() != l || transition_.cols() != l || stationary_.size() != l || sds_.size() != l)
        throw ShapeError("GaussianPairDensity: inconsistent number of states");
    if ((sds_.array() <= 0.0).any()) throw DomainError("GaussianPairDensity: standard deviations must be positive");
}

Eigen::VectorXd GaussianPairDensity::emissions(double z, double h) const {
    Eigen::VectorXd f(means_.size());
    for (Eigen::Index l = 0; l < means_.size(); ++l) {
        const double s = std::sqrt(sds_(l) * sds_(l) + h * h);
        const double u = (z - means_(l)) / s;
        f(l) = std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    return f;
}

double GaussianPairDensity::operator()(double z1, double z2, double h) const {
    const Eigen::VectorXd f1 = emissions(z1, h);
    const Eigen::VectorXd g2 = transition_ * emissions(z2, h);
    return stationary_.cwiseProduct(f1).dot(g2);
}

QuadratureOperator GaussianPairDensity::on_grid(const Grid& grid, double h) const {
    const Eigen::Index g = grid.size();
    const Eigen::Index l = means_.size();
    Eigen::MatrixXd f(g, l);
    for (Eigen::Index i = 0; i < g; ++i) f.row(i) = emissions(grid.nodes(i), h).transpose();
    // p(z_i, z_j) = sum_l pi_l f_l(z_i) (A f(z_j))_l
    Eigen::MatrixXd density = (f * stationary_.asDiagonal()) * (f * transition_.transpose()).transpose();
    return {grid, std::move(density)};
}

Grid GaussianPairDensity::covering_grid(Eigen::Index size, double h_max, double pad_sds) const {
    double lo = 0.0;
    double hi = 0.0;
    for (Eigen::Index l = 0; l < means_.size(); ++l) {
        const double pad = pad_sds * std::sqrt(sds_(l) * sds_(l) + h_max * h_max);
        lo = l == 0 ? means_(l) - pad : std::min(lo, means_(l) - pad);
        hi = l == 0 ? means_(l) + pad : std::max(hi, means_(l) + pad);
    }
    return line_grid(lo, hi, size);
}

}  // namespace hmmorder::quadrature
