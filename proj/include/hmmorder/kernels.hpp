#pragma once

#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace hmmorder {

enum class KernelFamily { Gaussian, VonMises, Custom };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// A translation-invariant univariate kernel supplied by the caller.
///
/// `density` is the unscaled kernel K(u). `unit_cross_gram` is
/// phi_1(u) = \int K(z) K(z - u) dz at unit bandwidth, as a function of the
/// difference u; the product kernel of bandwidth h then has
/// phi_h(a, b) = prod_j phi_1((a_j - b_j) / h) / h.
struct CustomKernel {
    std::function<double(double)> density;
    std::function<double(double)> unit_cross_gram;
    double l2_norm_sq = 0.0;
};

/// Product kernel of a single family with one scalar bandwidth shared by all coordinates.
///
/// For the von Mises family the bandwidth h maps to the concentration 1/h^2, the
/// kernel lives on the circle and only d = 1 is allowed.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double bandwidth = 1.0;
    std::size_t dim = 1;
    std::shared_ptr<const CustomKernel> custom;

    static KernelSpec gaussian(double h, std::size_t d = 1);
    static KernelSpec von_mises(double h);
    static KernelSpec from_custom(std::shared_ptr<const CustomKernel> kernel, double h, std::size_t d = 1);

    KernelSpec with_bandwidth(double h) const;

    double von_mises_concentration() const { return 1.0 / (bandwidth * bandwidth); }

    /// Throws DomainError / ShapeError on invalid parameters.
    void validate() const;
};

/// e^{-x} I_0(x) for x >= 0, finite for arbitrarily large x.
double bessel_i0_scaled(double x);

/// Unscaled univariate kernel K(u). For von Mises, u is an angle difference and the
/// concentration comes from the bandwidth.
double kernel_eval(const KernelSpec& spec, double u);

/// Smoothing kernel K_h(u) = K(u/h)/h on the line; the von Mises kernel is already scaled.
double scaled_kernel_eval(const KernelSpec& spec, double u);

/// phi_h as a function of the coordinate differences a - b.
double cross_gram_diff(const KernelSpec& spec, std::span<const double> diff);

/// phi_h(a, b) = \int K_h^d(z - a) K_h^d(z - b) dz in closed form.
double cross_gram(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);
double cross_gram(const KernelSpec& spec, double a, double b);

/// ||K||_2^2 of the univariate kernel (for von Mises, at the spec's concentration).
double kernel_l2_norm_sq(const KernelSpec& spec);

/// h = kappa * n^{-beta}. An empty kappa selects the data-driven constant.
struct BandwidthRule {
    double beta = 1.0 / 6.0;
    std::optional<double> kappa;

    /// beta = 1/6 for d = 1 and 1/(4 + 2d) otherwise, data-driven kappa.
    static BandwidthRule default_for_dim(std::size_t d);

    /// Throws ConfigError unless 0 < beta < 1/(2d) and kappa > 0.
    void validate(std::size_t d) const;
};

/// Silverman-style constant: 0.9 min(sd, IQR/1.34) for d = 1, 0.9 prod_j sd_j for d >= 2,
/// and 1 for circular data. Throws DegenerateDataError when the result is not positive.
double auto_kappa(const ObservedSeries& series);

/// Bandwidth for the series, with n the number of consecutive pairs.
double select_bandwidth(const BandwidthRule& rule, const ObservedSeries& series);

/// Sample standard deviation (n - 1 denominator) and type-7 quantiles.
double sample_sd(std::span<const double> values);
double sample_quantile(std::span<const double> values, double prob);

}  // namespace hmmorder
