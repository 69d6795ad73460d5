#include "hmmorder/kernels.hpp"

#include "hmmorder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace hmmorder {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double require_finite(double u) {
    if (!std::isfinite(u)) throw DomainError("kernel argument is not finite");
    return u;
}

}  // namespace

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::VonMises: return "vonmises";
        case KernelFamily::Custom: return "custom";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian") return KernelFamily::Gaussian;
    if (name == "vonmises" || name == "von-mises") return KernelFamily::VonMises;
    throw ConfigError("unknown kernel family '" + name + "'");
}

KernelSpec KernelSpec::gaussian(double h, std::size_t d) {
    KernelSpec spec{KernelFamily::Gaussian, h, d, nullptr};
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::von_mises(double h) {
    KernelSpec spec{KernelFamily::VonMises, h, 1, nullptr};
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::from_custom(std::shared_ptr<const CustomKernel> kernel, double h, std::size_t d) {
    KernelSpec spec{KernelFamily::Custom, h, d, std::move(kernel)};
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::with_bandwidth(double h) const {
    KernelSpec spec = *this;
    spec.bandwidth = h;
    spec.validate();
    return spec;
}

void KernelSpec::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("kernel bandwidth must be positive and finite");
    if (dim < 1) throw ShapeError("kernel dimension must be >= 1");
    if (family == KernelFamily::VonMises && dim != 1) throw ShapeError("the von Mises kernel is univariate");
    if (family == KernelFamily::Custom) {
        if (!custom || !custom->density || !custom->unit_cross_gram)
            throw DomainError("custom kernel requires density and unit_cross_gram");
        if (!(custom->l2_norm_sq > 0.0)) throw DomainError("custom kernel requires a positive l2_norm_sq");
    }
}

double bessel_i0_scaled(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_i0_scaled requires x >= 0");
    if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    // Hankel expansion: e^{-x} I_0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double f = 2.0 * k - 1.0;
        term *= f * f / (8.0 * k * x);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(kTwoPi * x);
}

double kernel_eval(const KernelSpec& spec, double u) {
    require_finite(u);
    switch (spec.family) {
        case KernelFamily::Gaussian: return kInvSqrt2Pi * std::exp(-0.5 * u * u);
        case KernelFamily::VonMises: {
            const double kappa = spec.von_mises_concentration();
            // exp(kappa cos u) / (2 pi I0(kappa)) with the e^{kappa} factor cancelled
            return std::exp(kappa * (std::cos(u) - 1.0)) / (kTwoPi * bessel_i0_scaled(kappa));
        }
        case KernelFamily::Custom: return spec.custom->density(u);
    }
    return 0.0;
}

double scaled_kernel_eval(const KernelSpec& spec, double u) {
    if (spec.family == KernelFamily::VonMises) return kernel_eval(spec, u);
    return kernel_eval(spec, u / spec.bandwidth) / spec.bandwidth;
}

double cross_gram_diff(const KernelSpec& spec, std::span<const double> diff) {
    if (diff.size() != spec.dim)
        throw ShapeError("cross_gram: point dimension " + std::to_string(diff.size()) + " does not match kernel dimension " +
                         std::to_string(spec.dim));
    const double h = spec.bandwidth;
    switch (spec.family) {
        case KernelFamily::Gaussian: {
            double sq = 0.0;
            for (const double v : diff) sq += require_finite(v) * v;
            const double d = static_cast<double>(spec.dim);
            return std::pow(4.0 * std::numbers::pi * h * h, -0.5 * d) * std::exp(-sq / (4.0 * h * h));
        }
        case KernelFamily::VonMises: {
            const double kappa = spec.von_mises_concentration();
            const double c = std::abs(std::cos(0.5 * require_finite(diff[0])));
            const double i0k = bessel_i0_scaled(kappa);
            // I0(2 kappa c) / (2 pi I0(kappa)^2), evaluated on the e^{-x}-scaled Bessel function
            return bessel_i0_scaled(2.0 * kappa * c) * std::exp(2.0 * kappa * (c - 1.0)) / (kTwoPi * i0k * i0k);
        }
        case KernelFamily::Custom: {
            double prod = 1.0;
            for (const double v : diff) prod *= spec.custom->unit_cross_gram(require_finite(v) / h) / h;
            return prod;
        }
    }
    return 0.0;
}

double cross_gram(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("cross_gram: points have different dimensions");
    std::vector<double> diff(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) diff[j] = a[j] - b[j];
    return cross_gram_diff(spec, diff);
}

double cross_gram(const KernelSpec& spec, double a, double b) {
    const double diff = a - b;
    return cross_gram_diff(spec, std::span<const double>(&diff, 1));
}

double kernel_l2_norm_sq(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::Gaussian: return 0.5 / std::sqrt(std::numbers::pi);
        case KernelFamily::VonMises: {
            const double zero = 0.0;
            return cross_gram_diff(spec, std::span<const double>(&zero, 1));
        }
        case KernelFamily::Custom: return spec.custom->l2_norm_sq;
    }
    return 0.0;
}

BandwidthRule BandwidthRule::default_for_dim(std::size_t d) {
    BandwidthRule rule;
    rule.beta = d <= 1 ? 1.0 / 6.0 : 1.0 / (4.0 + 2.0 * static_cast<double>(d));
    return rule;
}

void BandwidthRule::validate(std::size_t d) const {
    const double upper = 1.0 / (2.0 * static_cast<double>(d));
    if (!(beta > 0.0 && beta < upper))
        throw ConfigError("bandwidth exponent beta=" + std::to_string(beta) + " outside the consistency range (0, " +
                          std::to_string(upper) + ")");
    if (kappa && !(*kappa > 0.0 && std::isfinite(*kappa))) throw ConfigError("bandwidth constant kappa must be positive");
}

double sample_sd(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double sample_quantile(std::span<const double> values, double prob) {
    if (values.empty()) throw DegenerateDataError("quantile of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double auto_kappa(const ObservedSeries& series) {
    if (series.kind() == DataKind::Circular) return 1.0;
    const auto& pts = series.points();
    const std::size_t d = series.dim();
    double kappa = 0.9;
    for (std::size_t j = 0; j < d; ++j) {
        const Eigen::VectorXd col = pts.col(static_cast<Eigen::Index>(j));
        const std::span<const double> values(col.data(), static_cast<std::size_t>(col.size()));
        const double sd = sample_sd(values);
        if (d == 1) {
            const double iqr = sample_quantile(values, 0.75) - sample_quantile(values, 0.25);
            kappa *= std::min(sd, iqr / 1.34);
        } else {
            kappa *= sd;
        }
    }
    if (!(kappa > 0.0))
        throw DegenerateDataError("data-driven bandwidth constant is zero (no spread in the data)");
    return kappa;
}

double select_bandwidth(const BandwidthRule& rule, const ObservedSeries& series) {
    rule.validate(series.dim());
    const double kappa = rule.kappa ? *rule.kappa : auto_kappa(series);
    const auto n = static_cast<double>(series.n_pairs());
    return kappa * std::pow(n, -rule.beta);
}

}  // namespace hmmorder
