#pragma once

#include "hmmorder/kernels.hpp"
#include "hmmorder/operator.hpp"
#include "hmmorder/series.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hmmorder {

enum class ThresholdMode { Practical, Theoretical, Explicit };

/// Threshold on the tail statistics r_l.
///
/// Practical: tau = n^{-1/2} h^{-d} 10^{1-d}.
/// Theoretical: tau = n^{-1/2} [(n+1)/n C1]^{1/2} + n^{-1/2} h^{-d} C2 with
///   C1 = 36 ||K||_2^{4d} ln(1/alpha) t_mix and C2 = ||K||_2^{2d} (1 + 8 t_mix)^{1/2}.
/// Explicit: a fixed tau.
struct ThresholdRule {
    ThresholdMode mode = ThresholdMode::Practical;
    double alpha = 0.05;
    double t_mix = 1.0;
    /// ||K||_2^2 of the univariate kernel; taken from the kernel when empty.
    std::optional<double> kernel_l2_sq;
    double tau = 0.0;

    static ThresholdRule practical() { return {}; }
    static ThresholdRule theoretical(double alpha, double t_mix, std::optional<double> kernel_l2_sq = std::nullopt);
    static ThresholdRule explicit_value(double tau);
};

enum class EstimationMethod { Multivariate, MaxUnivariate };

std::string to_string(EstimationMethod method);

struct OrderEstimate {
    std::size_t l_hat = 0;
    std::vector<double> r_values;  // r_1 .. r_lmax
    std::vector<double> sigma;     // leading singular values
    double tau = 0.0;
    double bandwidth = 0.0;
    double kappa = 0.0;
    double beta = 0.0;
    std::size_t n_pairs = 0;
    std::size_t dim = 1;
    KernelFamily family = KernelFamily::Gaussian;
    EstimationMethod method = EstimationMethod::Multivariate;
    /// r_{lmax} > tau: the count hit lmax and is only a lower bound.
    bool truncated = false;
    /// Max-of-univariate only: one estimate per coordinate.
    std::vector<OrderEstimate> per_coordinate;
};

/// r_l = (sum_{j >= l} sigma_j^2)^{1/2} for l = 1..l_max, from the stored leading
/// values and the Frobenius norm. Negative round-off is clamped to zero.
std::vector<double> tail_stats(const SingularSpectrum& spectrum, std::size_t l_max);

double practical_threshold(std::size_t n, double h, std::size_t d);
double theoretical_threshold(const ThresholdRule& rule, std::size_t n, double h, std::size_t d);

/// Threshold for the rule's mode; the kernel supplies ||K||_2^2 when the rule does not.
double threshold_for(const ThresholdRule& rule, std::size_t n, double h, std::size_t d, const KernelSpec& kernel);

/// Number of l with r_l > tau (strict).
std::size_t count_exceeding(const std::vector<double>& r_values, double tau);

/// Bandwidth and overestimation level that drive the estimator to consistency:
/// h_n = kappa n^{-beta}, ln(1/alpha_n) = 1/h_n^{2d}.
struct ConsistencySchedule {
    double beta = 0.0;
    double bandwidth = 0.0;
    double alpha = 0.0;
};

ConsistencySchedule consistency_schedule(std::size_t n, std::size_t d, double kappa = 1.0,
                                         std::optional<double> beta = std::nullopt);

/// ln(1/alpha) = 1/h^{2d}
double alpha_for_bandwidth(double h, std::size_t d);

struct EstimatorOptions {
    /// Gaussian for linear data, von Mises for circular data when empty.
    std::optional<KernelFamily> family;
    /// Per-dimension default (beta = 1/6 or 1/(4+2d), data-driven kappa) when empty.
    std::optional<BandwidthRule> bandwidth_rule;
    /// Bypasses the bandwidth rule.
    std::optional<double> bandwidth;
    ThresholdRule threshold = ThresholdRule::practical();
    std::size_t l_max = 10;
    OperatorOptions operator_options;
};

/// Order estimate from the tail statistics of the pair-matrix spectrum.
OrderEstimate estimate_order(const ObservedSeries& series, const EstimatorOptions& options = {});

/// Order from an already computed spectrum.
OrderEstimate estimate_order_from_spectrum(const SingularSpectrum& spectrum, double tau, std::size_t l_max);

/// Maximum over coordinates of the univariate estimates, each with its own d = 1 rules.
OrderEstimate estimate_order_max_univariate(const ObservedSeries& series, const EstimatorOptions& options = {});

}  // namespace hmmorder
