#include "hmmorder/estimator.hpp"

#include "hmmorder/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hmmorder {

ThresholdRule ThresholdRule::theoretical(double alpha, double t_mix, std::optional<double> kernel_l2_sq) {
    ThresholdRule rule;
    rule.mode = ThresholdMode::Theoretical;
    rule.alpha = alpha;
    rule.t_mix = t_mix;
    rule.kernel_l2_sq = kernel_l2_sq;
    return rule;
}

ThresholdRule ThresholdRule::explicit_value(double tau) {
    ThresholdRule rule;
    rule.mode = ThresholdMode::Explicit;
    rule.tau = tau;
    return rule;
}

std::string to_string(EstimationMethod method) {
    return method == EstimationMethod::Multivariate ? "multivariate" : "max-univariate";
}

std::vector<double> tail_stats(const SingularSpectrum& spectrum, std::size_t l_max) {
    if (l_max > spectrum.sigma.size() + 1 && !spectrum.complete())
        throw DomainError("tail_stats: l_max exceeds the stored singular values + 1");
    std::vector<double> r(l_max);
    double head = 0.0;  // sum_{j < l} sigma_j^2
    for (std::size_t l = 0; l < l_max; ++l) {
        r[l] = std::sqrt(std::max(0.0, spectrum.frob_sq - head));
        if (l < spectrum.sigma.size()) head += spectrum.sigma[l] * spectrum.sigma[l];
    }
    return r;
}

double practical_threshold(std::size_t n, double h, std::size_t d) {
    if (n < 1 || !(h > 0.0) || d < 1) throw DomainError("practical_threshold: need n >= 1, h > 0, d >= 1");
    const double dd = static_cast<double>(d);
    return std::pow(static_cast<double>(n), -0.5) * std::pow(h, -dd) * std::pow(10.0, 1.0 - dd);
}

double theoretical_threshold(const ThresholdRule& rule, std::size_t n, double h, std::size_t d) {
    if (rule.mode != ThresholdMode::Theoretical) throw ConfigError("theoretical_threshold: rule is not theoretical");
    if (!(rule.alpha > 0.0 && rule.alpha < 1.0)) throw DomainError("theoretical_threshold: alpha must lie in (0, 1)");
    if (!(rule.t_mix >= 1.0)) throw DomainError("theoretical_threshold: t_mix must be >= 1");
    if (!rule.kernel_l2_sq || !(*rule.kernel_l2_sq > 0.0))
        throw ConfigError("theoretical_threshold: ||K||_2^2 is required");
    if (n < 1 || !(h > 0.0) || d < 1) throw DomainError("theoretical_threshold: need n >= 1, h > 0, d >= 1");
    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n);
    const double norm_sq = *rule.kernel_l2_sq;
    // ||K||_2^{4d} = (||K||_2^2)^{2d}
    const double c1 = 36.0 * std::pow(norm_sq, 2.0 * dd) * std::log(1.0 / rule.alpha) * rule.t_mix;
    const double c2 = std::pow(norm_sq, dd) * std::sqrt(1.0 + 8.0 * rule.t_mix);
    return std::sqrt((nn + 1.0) / nn * c1) / std::sqrt(nn) + c2 / (std::sqrt(nn) * std::pow(h, dd));
}

double threshold_for(const ThresholdRule& rule, std::size_t n, double h, std::size_t d, const KernelSpec& kernel) {
    switch (rule.mode) {
        case ThresholdMode::Practical: return practical_threshold(n, h, d);
        case ThresholdMode::Explicit:
            if (!(rule.tau > 0.0)) throw ConfigError("explicit threshold must be positive");
            return rule.tau;
        case ThresholdMode::Theoretical: {
            ThresholdRule filled = rule;
            if (!filled.kernel_l2_sq) filled.kernel_l2_sq = kernel_l2_norm_sq(kernel);
            return theoretical_threshold(filled, n, h, d);
        }
    }
    return 0.0;
}

std::size_t count_exceeding(const std::vector<double>& r_values, double tau) {
    return static_cast<std::size_t>(std::count_if(r_values.begin(), r_values.end(), [tau](double r) { return r > tau; }));
}

double alpha_for_bandwidth(double h, std::size_t d) {
    if (!(h > 0.0)) throw DomainError("alpha_for_bandwidth: h must be positive");
    return std::exp(-std::pow(h, -2.0 * static_cast<double>(d)));
}

ConsistencySchedule consistency_schedule(std::size_t n, std::size_t d, double kappa, std::optional<double> beta) {
    if (n < 2) throw DomainError("consistency_schedule: n must be >= 2");
    BandwidthRule rule = BandwidthRule::default_for_dim(d);
    if (beta) rule.beta = *beta;
    rule.kappa = kappa;
    rule.validate(d);
    ConsistencySchedule out;
    out.beta = rule.beta;
    out.bandwidth = kappa * std::pow(static_cast<double>(n), -rule.beta);
    out.alpha = alpha_for_bandwidth(out.bandwidth, d);
    return out;
}

OrderEstimate estimate_order_from_spectrum(const SingularSpectrum& spectrum, double tau, std::size_t l_max) {
    OrderEstimate est;
    est.r_values = tail_stats(spectrum, l_max);
    est.sigma = spectrum.sigma;
    est.tau = tau;
    est.n_pairs = spectrum.n_pairs;
    // strict inequality; r is nonincreasing so this is also the longest prefix above tau
    est.l_hat = count_exceeding(est.r_values, tau);
    est.truncated = !est.r_values.empty() && est.r_values.back() > tau;
    return est;
}

OrderEstimate estimate_order(const ObservedSeries& series, const EstimatorOptions& options) {
    if (options.l_max < 1) throw ConfigError("l_max must be >= 1");
    const bool circular = series.kind() == DataKind::Circular;
    const KernelFamily family =
        options.family.value_or(circular ? KernelFamily::VonMises : KernelFamily::Gaussian);
    if (circular && family != KernelFamily::VonMises)
        throw ConfigError("circular data require the von Mises kernel");
    if (!circular && family == KernelFamily::VonMises)
        throw ConfigError("the von Mises kernel requires circular data");
    if (family == KernelFamily::Custom) throw ConfigError("custom kernels are not selectable by family");

    const std::size_t d = series.dim();
    const BandwidthRule rule = options.bandwidth_rule.value_or(BandwidthRule::default_for_dim(d));
    double kappa = 0.0;
    double h = 0.0;
    if (options.bandwidth) {
        h = *options.bandwidth;
    } else {
        rule.validate(d);
        kappa = rule.kappa ? *rule.kappa : auto_kappa(series);
        h = kappa * std::pow(static_cast<double>(series.n_pairs()), -rule.beta);
    }
    const KernelSpec kernel = family == KernelFamily::VonMises ? KernelSpec::von_mises(h) : KernelSpec::gaussian(h, d);

    const SingularSpectrum spectrum = operator_spectrum(series, kernel, options.l_max, options.operator_options);
    const double tau = threshold_for(options.threshold, series.n_pairs(), h, d, kernel);
    OrderEstimate est = estimate_order_from_spectrum(spectrum, tau, options.l_max);
    est.bandwidth = h;
    est.kappa = kappa;
    est.beta = options.bandwidth ? 0.0 : rule.beta;
    est.dim = d;
    est.family = family;
    est.method = EstimationMethod::Multivariate;
    return est;
}

OrderEstimate estimate_order_max_univariate(const ObservedSeries& series, const EstimatorOptions& options) {
    EstimatorOptions per = options;
    if (!per.bandwidth_rule || !(per.bandwidth_rule->beta < 0.5)) per.bandwidth_rule = BandwidthRule::default_for_dim(1);

    OrderEstimate best;
    std::vector<OrderEstimate> coords;
    for (std::size_t j = 0; j < series.dim(); ++j) {
        coords.push_back(estimate_order(series.coordinate(j), per));
        if (j == 0 || coords.back().l_hat > best.l_hat) best = coords.back();
    }
    best.per_coordinate = std::move(coords);
    best.method = EstimationMethod::MaxUnivariate;
    best.dim = series.dim();
    best.truncated = std::any_of(best.per_coordinate.begin(), best.per_coordinate.end(),
                                 [](const OrderEstimate& e) { return e.truncated; });
    return best;
}

}  // namespace hmmorder
