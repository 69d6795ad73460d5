#pragma once

#include "hmmorder/kernels.hpp"
#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

// Grid discretisation of integral operators with a kernel p(z1, z2) on the line or the
// circle. Used as an independent check of the matrix pipeline.
namespace hmmorder::quadrature {

/// Uniform nodes with equal weights. Periodic grids cover [0, 2pi) without the endpoint.
struct Grid {
    Eigen::VectorXd nodes;
    double weight = 0.0;
    bool periodic = false;

    Eigen::Index size() const { return nodes.size(); }
};

Grid line_grid(double lo, double hi, Eigen::Index size);
Grid circle_grid(Eigen::Index size);

/// Operator with kernel values density(i, j) = p(z_i, z_j) on a grid.
class QuadratureOperator {
public:
    QuadratureOperator(Grid grid, Eigen::MatrixXd density);

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& density_values() const { return density_; }

    /// Singular values of the discretised operator, nonincreasing.
    Eigen::VectorXd singular_values() const;
    /// sum_ij p(z_i, z_j) w^2
    double total_mass() const;

private:
    Grid grid_;
    Eigen::MatrixXd density_;
};

/// Grid for the empirical pair density of a univariate series: the data range
/// padded by `pad_bandwidths` * h on the line, or the full circle.
Grid grid_for(const ObservedSeries& series, const KernelSpec& kernel, Eigen::Index size,
              double pad_bandwidths = 8.0);

/// Kernel pair-density estimate (1/n) sum_t K_h(z1 - y_t) K_h(z2 - y_{t+1}) over
/// within-sequence pairs, sampled on the grid.
QuadratureOperator empirical_pair_operator(const ObservedSeries& series, const KernelSpec& kernel, const Grid& grid);

/// Leading singular values of the empirical smoothed operator by quadrature.
///
/// The grid is accepted only if a grid of half the resolution already reproduces the
/// returned values to `resolution_tol` (relative); otherwise OracleResolutionError.
std::vector<double> quadrature_svd_oracle(const ObservedSeries& series, const KernelSpec& kernel,
                                          Eigen::Index grid_size, std::size_t count,
                                          double resolution_tol = 1e-4);

/// Pair density sum_l pi_l f_l(z1) g_l(z2) of a stationary HMM with univariate
/// Gaussian emissions, where g_l = sum_m A[l,m] f_m. Smoothing with a Gaussian kernel
/// of bandwidth h replaces every variance s^2 by s^2 + h^2.
class GaussianPairDensity {
public:
    GaussianPairDensity(Eigen::MatrixXd transition, Eigen::VectorXd stationary, Eigen::VectorXd means,
                        Eigen::VectorXd sds);

    double operator()(double z1, double z2, double h = 0.0) const;

    QuadratureOperator on_grid(const Grid& grid, double h = 0.0) const;

    /// Grid covering every emission mean +- `pad_sds` standard deviations (plus smoothing).
    Grid covering_grid(Eigen::Index size, double h_max = 0.0, double pad_sds = 10.0) const;

    std::size_t num_states() const { return static_cast<std::size_t>(means_.size()); }

private:
    Eigen::VectorXd emissions(double z, double h) const;

    Eigen::MatrixXd transition_;
    Eigen::VectorXd stationary_;
    Eigen::VectorXd means_;
    Eigen::VectorXd sds_;
};

}  // namespace hmmorder::quadrature
