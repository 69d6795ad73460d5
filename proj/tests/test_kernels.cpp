#include <doctest.h>

#include "hmmorder/errors.hpp"
#include "hmmorder/kernels.hpp"
#include "hmmorder/series.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace hmmorder;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gaussian_cross_quad(double h, double a, double b) {
    const auto kh = [h](double u) { return std::exp(-0.5 * u * u / (h * h)) / (h * std::sqrt(kTwoPi)); };
    const double mid = 0.5 * (a + b);
    const auto f = [&](double z) { return kh(z - a) * kh(z - b); };
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, mid - 40.0 * h, mid + 40.0 * h, 20, 1e-14, &err);
}

double von_mises_cross_quad(double h, double a, double b) {
    const double kappa = 1.0 / (h * h);
    const double norm = kTwoPi * boost::math::cyl_bessel_i(0, kappa);
    // exp(kappa (cos(z-a) + cos(z-b))) / norm^2 with the peak factored out
    const auto f = [&](double z) {
        return std::exp(kappa * (std::cos(z - a) + std::cos(z - b) - 2.0)) * std::exp(2.0 * kappa) / (norm * norm);
    };
    return boost::math::quadrature::trapezoidal(f, 0.0, kTwoPi, 1e-15);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("gaussian kernel values") {
    const KernelSpec k = KernelSpec::gaussian(1.0);
    CHECK(kernel_eval(k, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(kernel_eval(k, -1.0) == kernel_eval(k, 1.0));
    CHECK_THROWS_AS(kernel_eval(k, std::nan("")), DomainError);
    CHECK_THROWS_AS(kernel_eval(k, INFINITY), DomainError);
}

TEST_CASE("von Mises kernel integrates to one") {
    for (double h : {1.0, 0.5, 0.2}) {
        const KernelSpec k = KernelSpec::von_mises(h);
        const double total = boost::math::quadrature::trapezoidal([&](double u) { return kernel_eval(k, u); }, 0.0, kTwoPi, 1e-14);
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("gaussian kernel integrates to one") {
    const KernelSpec k = KernelSpec::gaussian(1.0);
    double err = 0.0;
    const double total = gauss_kronrod<double, 61>::integrate([&](double u) { return kernel_eval(k, u); }, -40.0, 40.0, 20, 1e-14, &err);
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("cross_gram closed forms against quadrature") {
    const KernelSpec g = KernelSpec::gaussian(1.0);
    CHECK(cross_gram(g, 0.3, 0.3) == doctest::Approx(gaussian_cross_quad(1.0, 0.3, 0.3)).epsilon(1e-12));
    CHECK(cross_gram(g, 0.3, 0.3) == doctest::Approx(0.2820947917738781).epsilon(1e-13));
    CHECK(cross_gram(g, -1.0, 1.0) == doctest::Approx(gaussian_cross_quad(1.0, -1.0, 1.0)).epsilon(1e-12));
    CHECK(cross_gram(g, -1.0, 1.0) == doctest::Approx(0.2820947917738781 * std::exp(-1.0)).epsilon(1e-13));

    const KernelSpec v = KernelSpec::von_mises(1.0);
    const double i0_1 = boost::math::cyl_bessel_i(0, 1.0);
    const double expected = boost::math::cyl_bessel_i(0, 2.0) / (kTwoPi * i0_1 * i0_1);
    CHECK(cross_gram(v, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(std::abs(cross_gram(v, 1.0, 1.0) - von_mises_cross_quad(1.0, 1.0, 1.0)) < 1e-10);
}

TEST_CASE("gaussian product kernel factorises") {
    const KernelSpec g2 = KernelSpec::gaussian(0.7, 2);
    const KernelSpec g1 = KernelSpec::gaussian(0.7, 1);
    const double a[2] = {0.1, -0.4};
    const double b[2] = {1.3, 0.2};
    CHECK(cross_gram(g2, a, b) == doctest::Approx(cross_gram(g1, a[0], b[0]) * cross_gram(g1, a[1], b[1])).epsilon(1e-14));
    const double c[1] = {0.0};
    CHECK_THROWS_AS(cross_gram(g2, a, c), ShapeError);
    CHECK_THROWS_AS(cross_gram(g1, a, b), ShapeError);
}

TEST_CASE("random pairs agree with adaptive quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> line(-2.0, 2.0);
    std::uniform_real_distribution<double> circle(0.0, kTwoPi);
    double worst_g = 0.0;
    double worst_v = 0.0;
    for (double h : {0.2, 0.5, 1.0}) {
        const KernelSpec g = KernelSpec::gaussian(h);
        const KernelSpec v = KernelSpec::von_mises(h);
        for (int i = 0; i < 100; ++i) {
            const double a = line(rng), b = line(rng);
            const double q = gaussian_cross_quad(h, a, b);
            worst_g = std::max(worst_g, std::abs(cross_gram(g, a, b) - q) / q);
            const double x = circle(rng), y = circle(rng);
            const double qv = von_mises_cross_quad(h, x, y);
            worst_v = std::max(worst_v, std::abs(cross_gram(v, x, y) - qv) / qv);
        }
    }
    CHECK(worst_g <= 1e-8);
    CHECK(worst_v <= 1e-8);
}

TEST_CASE("cross_gram symmetry, diagonal dominance and scaling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (double h : {0.3, 1.1}) {
        const KernelSpec g = KernelSpec::gaussian(h, 2);
        const KernelSpec g_unit = KernelSpec::gaussian(1.0, 2);
        const KernelSpec v = KernelSpec::von_mises(h);
        for (int i = 0; i < 50; ++i) {
            const double a[2] = {u(rng), u(rng)};
            const double b[2] = {u(rng), u(rng)};
            CHECK(cross_gram(g, a, b) == cross_gram(g, b, a));
            CHECK(cross_gram(g, a, b) <= cross_gram(g, a, a));
            const double as[2] = {a[0] / h, a[1] / h};
            const double bs[2] = {b[0] / h, b[1] / h};
            CHECK(cross_gram(g, a, b) == doctest::Approx(cross_gram(g_unit, as, bs) / (h * h)).epsilon(1e-12));
            const double x = wrap_angle(a[0]), y = wrap_angle(b[0]);
            CHECK(cross_gram(v, x, y) == doctest::Approx(cross_gram(v, y, x)).epsilon(1e-15));
            CHECK(cross_gram(v, x, y) <= cross_gram(v, x, x));
        }
    }
}

TEST_CASE("kernel L2 norms") {
    double err = 0.0;
    const KernelSpec g = KernelSpec::gaussian(0.37);
    const double quad = gauss_kronrod<double, 61>::integrate(
        [&](double u) { return kernel_eval(g, u) * kernel_eval(g, u); }, -40.0, 40.0, 20, 1e-14, &err);
    CHECK(kernel_l2_norm_sq(g) == doctest::Approx(quad).epsilon(1e-12));
    CHECK(kernel_l2_norm_sq(g) == doctest::Approx(0.2820948).epsilon(1e-7));
    CHECK(kernel_l2_norm_sq(g) == doctest::Approx(cross_gram(KernelSpec::gaussian(1.0), 0.0, 0.0)).epsilon(1e-15));

    const KernelSpec v = KernelSpec::von_mises(1.0);
    const double qv = boost::math::quadrature::trapezoidal(
        [&](double u) { return kernel_eval(v, u) * kernel_eval(v, u); }, 0.0, kTwoPi, 1e-15);
    CHECK(kernel_l2_norm_sq(v) == doctest::Approx(qv).epsilon(1e-10));
}

TEST_CASE("scaled Bessel function") {
    for (double x : {0.0, 0.5, 3.0, 40.0, 300.0, 499.0, 501.0, 650.0}) {
        const double ref = boost::math::cyl_bessel_i(0, x) * std::exp(-x);
        CHECK(bessel_i0_scaled(x) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(std::isfinite(bessel_i0_scaled(1e8)));
    CHECK(bessel_i0_scaled(1e8) == doctest::Approx(1.0 / std::sqrt(kTwoPi * 1e8)).epsilon(1e-8));
    CHECK_THROWS_AS(bessel_i0_scaled(-1.0), DomainError);
    // small bandwidths stay finite
    const KernelSpec v = KernelSpec::von_mises(0.01);
    CHECK(std::isfinite(cross_gram(v, 0.1, 0.1)));
    CHECK(cross_gram(v, 0.1, 0.1) > 0.0);
}

TEST_CASE("custom kernel reproduces the gaussian family") {
    auto custom = std::make_shared<CustomKernel>();
    custom->density = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(kTwoPi); };
    custom->unit_cross_gram = [](double u) { return std::exp(-0.25 * u * u) / (2.0 * std::sqrt(std::numbers::pi)); };
    custom->l2_norm_sq = 0.5 / std::sqrt(std::numbers::pi);
    const KernelSpec c = KernelSpec::from_custom(custom, 0.6, 2);
    const KernelSpec g = KernelSpec::gaussian(0.6, 2);
    const double a[2] = {0.2, 1.0};
    const double b[2] = {-0.5, 0.4};
    CHECK(cross_gram(c, a, b) == doctest::Approx(cross_gram(g, a, b)).epsilon(1e-14));
    CHECK(kernel_l2_norm_sq(c) == doctest::Approx(kernel_l2_norm_sq(g)).epsilon(1e-15));
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0), DomainError);
    CHECK_THROWS_AS(KernelSpec::gaussian(-1.0), DomainError);
    CHECK_THROWS_AS(KernelSpec::gaussian(1.0, 0), ShapeError);
    KernelSpec bad = KernelSpec::von_mises(1.0);
    bad.dim = 2;
    CHECK_THROWS_AS(bad.validate(), ShapeError);
    CHECK(kernel_family_from_string("gaussian") == KernelFamily::Gaussian);
    CHECK(kernel_family_from_string("vonmises") == KernelFamily::VonMises);
    CHECK_THROWS_AS(kernel_family_from_string("epanechnikov"), ConfigError);
}

TEST_CASE("bandwidth selection") {
    std::vector<double> values(4097);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(0.37 * static_cast<double>(i));
    const ObservedSeries s = ObservedSeries::univariate(values);
    CHECK(select_bandwidth(BandwidthRule{1.0 / 6.0, 0.9}, s) == doctest::Approx(0.225).epsilon(1e-14));

    // (-1, 0, 1): sd = 1, type-7 IQR = 1, kappa = 0.9 min(1, 1/1.34)
    const ObservedSeries three = ObservedSeries::univariate({-1.0, 0.0, 1.0});
    CHECK(auto_kappa(three) == doctest::Approx(0.9 / 1.34).epsilon(1e-15));
    // (0, 0, 0, 10): sd = 5, IQR = 2.5, kappa = 0.9 * min(5, 2.5/1.34)
    const ObservedSeries skew = ObservedSeries::univariate({0.0, 0.0, 0.0, 10.0});
    CHECK(auto_kappa(skew) == doctest::Approx(0.9 * 2.5 / 1.34).epsilon(1e-15));

    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 1, 2, 2, 4, 3, 6;
    const double sd0 = std::sqrt(5.0 / 3.0);
    CHECK(auto_kappa(ObservedSeries(pts)) == doctest::Approx(0.9 * sd0 * 2.0 * sd0).epsilon(1e-14));

    std::vector<double> angles(8767);
    for (std::size_t i = 0; i < angles.size(); ++i) angles[i] = wrap_angle(0.1 * static_cast<double>(i));
    const ObservedSeries circ = ObservedSeries::univariate(angles, DataKind::Circular);
    CHECK(select_bandwidth(BandwidthRule::default_for_dim(1), circ) == doctest::Approx(std::pow(8766.0, -1.0 / 6.0)).epsilon(1e-14));

    CHECK_THROWS_AS(auto_kappa(ObservedSeries::univariate({2.0, 2.0, 2.0})), DegenerateDataError);
    CHECK_THROWS_AS(BandwidthRule({0.5, std::nullopt}).validate(1), ConfigError);
    CHECK_THROWS_AS(BandwidthRule({0.25, std::nullopt}).validate(2), ConfigError);
    CHECK_THROWS_AS(BandwidthRule({0.0, std::nullopt}).validate(1), ConfigError);
    CHECK_NOTHROW(BandwidthRule({0.125, std::nullopt}).validate(2));
    CHECK(BandwidthRule::default_for_dim(1).beta == doctest::Approx(1.0 / 6.0));
    CHECK(BandwidthRule::default_for_dim(3).beta == doctest::Approx(0.1));
}

TEST_CASE("bandwidth does not depend on the order of observations") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<double> v(301);
    for (auto& x : v) x = z(rng);
    const double h = select_bandwidth(BandwidthRule::default_for_dim(1), ObservedSeries::univariate(v));
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(select_bandwidth(BandwidthRule::default_for_dim(1), ObservedSeries::univariate(v)) == doctest::Approx(h).epsilon(1e-15));
}

}  // TEST_SUITE
