#pragma once

#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hmmorder {

/// Trigonometric-basis moment estimator of the order.
struct SpectralConfig {
    std::size_t M = 20;       // basis size
    std::size_t M_reg = 5;    // number of smallest singular values in the regression
    double tau_factor = 1.5;

    /// Throws ConfigError unless 2 <= M_reg <= M and tau_factor > 0.
    void validate() const;
};

/// Affine map of a univariate series onto [0, 1]. Constant series throw DegenerateDataError.
ObservedSeries scale_to_unit(const ObservedSeries& series);

/// phi_0 = 1, phi_k(y) = sqrt(2) cos(pi k y)
double cosine_basis(std::size_t k, double y);

/// N[k, l] = (1/n) sum_t phi_k(y_t) phi_l(y_{t+1}) over within-sequence pairs.
Eigen::MatrixXd build_nhat(const ObservedSeries& series, std::size_t M);

struct SignificanceResult {
    std::size_t l_hat = 0;
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> fitted;  // intercept + slope * j for j = 1..M
};

/// OLS of sigma_j on j over the M_reg smallest values; sigma_j is significant when
/// sigma_j > tau_factor * fit(j). l_hat counts the significant prefix.
SignificanceResult significance_rule(const std::vector<double>& sigma, const SpectralConfig& config);

enum class ScaleMode { Auto, Always, Never };

struct SpectralEstimate {
    std::size_t l_hat = 0;
    std::vector<double> sigma;
    SignificanceResult fit;
    bool rescaled = false;
};

/// Auto rescales unless the series is linear and already inside [0, 1].
SpectralEstimate spectral_order(const ObservedSeries& series, const SpectralConfig& config = {},
                                ScaleMode scale = ScaleMode::Auto);

}  // namespace hmmorder
