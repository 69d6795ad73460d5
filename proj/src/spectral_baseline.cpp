#include "hmmorder/spectral_baseline.hpp"

#include "hmmorder/errors.hpp"
#include "hmmorder/linalg.hpp"

#include <cmath>
#include <numbers>

namespace hmmorder {

void SpectralConfig::validate() const {
    if (M_reg < 2) throw ConfigError("spectral baseline: M_reg must be >= 2 for the regression");
    if (M_reg > M) throw ConfigError("spectral baseline: M_reg must not exceed M");
    if (!(tau_factor > 0.0)) throw ConfigError("spectral baseline: tau_factor must be positive");
}

ObservedSeries scale_to_unit(const ObservedSeries& series) {
    if (series.dim() != 1) throw ShapeError("scale_to_unit: univariate series only");
    const auto col = series.points().col(0);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (!(hi > lo)) throw DegenerateDataError("scale_to_unit: constant series");
    Eigen::MatrixXd scaled = (series.points().array() - lo) / (hi - lo);
    return ObservedSeries(std::move(scaled), series.sequence_lengths(), DataKind::Linear);
}

double cosine_basis(std::size_t k, double y) {
    if (k == 0) return 1.0;
    return std::numbers::sqrt2 * std::cos(std::numbers::pi * static_cast<double>(k) * y);
}

Eigen::MatrixXd build_nhat(const ObservedSeries& series, std::size_t M) {
    if (series.dim() != 1) throw ShapeError("build_nhat: univariate series only");
    if (M < 1) throw ConfigError("build_nhat: M must be >= 1");
    const PairSelectors sel = build_selectors(series);
    const auto n = static_cast<Eigen::Index>(sel.size());
    const auto m = static_cast<Eigen::Index>(M);
    const auto& y = series.points();
    Eigen::MatrixXd b1(n, m);
    Eigen::MatrixXd b2(n, m);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index k = 0; k < m; ++k) {
            b1(t, k) = cosine_basis(static_cast<std::size_t>(k), y(sel.first[static_cast<std::size_t>(t)], 0));
            b2(t, k) = cosine_basis(static_cast<std::size_t>(k), y(sel.second[static_cast<std::size_t>(t)], 0));
        }
    }
    return (b1.transpose() * b2) / static_cast<double>(n);
}

SignificanceResult significance_rule(const std::vector<double>& sigma, const SpectralConfig& config) {
    config.validate();
    const std::size_t m = sigma.size();
    if (config.M_reg > m) throw ConfigError("significance_rule: M_reg exceeds the number of singular values");

    // OLS on j = m - M_reg + 1 .. m
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = m - config.M_reg + 1; j <= m; ++j) {
        sx += static_cast<double>(j);
        sy += sigma[j - 1];
    }
    const double k = static_cast<double>(config.M_reg);
    const double mx = sx / k;
    const double my = sy / k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = m - config.M_reg + 1; j <= m; ++j) {
        const double dx = static_cast<double>(j) - mx;
        sxx += dx * dx;
        sxy += dx * (sigma[j - 1] - my);
    }

    SignificanceResult out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.fitted.resize(m);
    for (std::size_t j = 1; j <= m; ++j) out.fitted[j - 1] = out.intercept + out.slope * static_cast<double>(j);
    while (out.l_hat < m && sigma[out.l_hat] > config.tau_factor * out.fitted[out.l_hat]) ++out.l_hat;
    return out;
}

SpectralEstimate spectral_order(const ObservedSeries& series, const SpectralConfig& config, ScaleMode scale) {
    config.validate();
    if (series.dim() != 1) throw ShapeError("spectral_order: univariate series only");
    if (config.M > series.n_pairs()) throw ConfigError("spectral_order: M exceeds the number of pairs");

    SpectralEstimate est;
    const auto col = series.points().col(0);
    const bool inside = series.kind() == DataKind::Linear && col.minCoeff() >= 0.0 && col.maxCoeff() <= 1.0;
    est.rescaled = scale == ScaleMode::Always || (scale == ScaleMode::Auto && !inside);

    const Eigen::MatrixXd nhat = est.rescaled ? build_nhat(scale_to_unit(series), config.M) : build_nhat(series, config.M);
    const Eigen::VectorXd s = linalg::singular_values(nhat);
    est.sigma.assign(s.data(), s.data() + s.size());
    est.fit = significance_rule(est.sigma, config);
    est.l_hat = est.fit.l_hat;
    return est;
}

}  // namespace hmmorder
