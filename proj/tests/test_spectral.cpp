#include <doctest.h>

#include "hmmorder/errors.hpp"
#include "hmmorder/hmm_sim.hpp"
#include "hmmorder/spectral_baseline.hpp"

#include <cmath>
#include <numbers>

using namespace hmmorder;

namespace {

Eigen::MatrixXd brute_nhat(const std::vector<double>& y, std::size_t M) {
    const auto m = static_cast<Eigen::Index>(M);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    const double n = static_cast<double>(y.size() - 1);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = 0; l < m; ++l) {
            double s = 0.0;
            for (std::size_t t = 0; t + 1 < y.size(); ++t) {
                const double a = k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(std::numbers::pi * static_cast<double>(k) * y[t]);
                const double b = l == 0 ? 1.0 : std::sqrt(2.0) * std::cos(std::numbers::pi * static_cast<double>(l) * y[t + 1]);
                s += a * b;
            }
            out(k, l) = s / n;
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("rescaling onto the unit interval") {
    Eigen::MatrixXd p(3, 1);
    p << 2.0, 4.0, 6.0;
    const ObservedSeries s = scale_to_unit(ObservedSeries(p));
    CHECK(s.points()(0, 0) == 0.0);
    CHECK(s.points()(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.points()(2, 0) == 1.0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 1, 3.0);
    CHECK_THROWS_AS(scale_to_unit(ObservedSeries(c)), DegenerateDataError);
    CHECK_THROWS_AS(spectral_order(ObservedSeries(c), SpectralConfig{3, 2, 1.5}), DegenerateDataError);

    Eigen::MatrixXd two(5, 1);
    two << 1, 2, 3, 4, 5;
    const ObservedSeries multi = scale_to_unit(ObservedSeries(two, {2, 3}));
    CHECK(multi.sequence_lengths() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("basis") {
    CHECK(cosine_basis(0, 0.3) == 1.0);
    CHECK(cosine_basis(1, 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(cosine_basis(2, 0.25) == doctest::Approx(0.0));
    CHECK(cosine_basis(1, 1.0) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("moment matrix against a double loop") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ObservedSeries s = scale_to_unit(simulate(make_scenario("gauss3"), 300 + 100 * seed, seed).series);
        const std::size_t M = 5 + 5 * seed;
        std::vector<double> y(s.points().col(0).data(), s.points().col(0).data() + s.points().rows());
        const Eigen::MatrixXd nhat = build_nhat(s, M);
        CHECK(nhat(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((nhat - brute_nhat(y, M)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("moment matrix skips pairs across sequences") {
    const ObservedSeries a = scale_to_unit(simulate(make_scenario("beta3"), 60, 1).series);
    Eigen::MatrixXd both(122, 1);
    both.topRows(61) = a.points();
    both.bottomRows(61) = a.points();
    const ObservedSeries pooled(both, {61, 61});
    CHECK((build_nhat(pooled, 6) - build_nhat(a, 6)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("significance rule by hand") {
    const std::vector<double> sigma{10, 9, 8, 0.04, 0.03, 0.02, 0.01};
    const SignificanceResult r = significance_rule(sigma, SpectralConfig{7, 4, 1.5});
    CHECK(r.slope == doctest::Approx(-0.01).epsilon(1e-9));
    CHECK(r.intercept == doctest::Approx(0.08).epsilon(1e-9));
    CHECK(r.l_hat == 3);
    REQUIRE(r.fitted.size() == 7);
    CHECK(r.fitted[0] == doctest::Approx(0.07).epsilon(1e-9));

    CHECK(significance_rule(std::vector<double>(7, 2.0), SpectralConfig{7, 4, 1.5}).l_hat == 0);
    CHECK(significance_rule(std::vector<double>(7, 0.0), SpectralConfig{7, 4, 1.5}).l_hat == 0);
    // only the prefix counts
    const std::vector<double> gap{10, 0.05, 8, 0.04, 0.03, 0.02, 0.01};
    CHECK(significance_rule(gap, SpectralConfig{7, 4, 1.5}).l_hat == 1);
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(SpectralConfig({20, 1, 1.5}).validate(), ConfigError);
    CHECK_THROWS_AS(SpectralConfig({20, 21, 1.5}).validate(), ConfigError);
    CHECK_THROWS_AS(SpectralConfig({20, 5, 0.0}).validate(), ConfigError);
    CHECK_NOTHROW(SpectralConfig({20, 20, 1.5}).validate());
    const ObservedSeries s = simulate(make_scenario("beta3"), 10, 1).series;
    CHECK_THROWS_AS(spectral_order(s, SpectralConfig{20, 5, 1.5}), ConfigError);
}

TEST_CASE("affine invariance") {
    const ObservedSeries s = simulate(make_scenario("gauss3"), 800, 11).series;
    const SpectralEstimate base = spectral_order(s);
    CHECK(base.rescaled);
    for (double a : {3.0, -0.5}) {
        const ObservedSeries t(s.points().array() * a + 7.0);
        const SpectralEstimate e = spectral_order(t);
        CHECK(e.l_hat == base.l_hat);
        for (std::size_t j = 0; j < base.sigma.size(); ++j) CHECK(std::abs(e.sigma[j] - base.sigma[j]) <= 1e-9);
    }
}

TEST_CASE("beta scenario at moderate n") {
    const ObservedSeries s = simulate(make_scenario("beta3"), 2000, 5).series;
    const SpectralEstimate e = spectral_order(s);
    CHECK_FALSE(e.rescaled);
    CHECK(e.sigma.size() == 20);
    CHECK(std::is_sorted(e.sigma.rbegin(), e.sigma.rend()));
    CHECK(e.l_hat >= 2);
    CHECK(spectral_order(s, {}, ScaleMode::Always).rescaled);
}

}  // TEST_SUITE
