#include <doctest.h>

#include "hmmorder/errors.hpp"
#include "hmmorder/estimator.hpp"
#include "hmmorder/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace hmmorder;

namespace {

ObservedSeries parse(const std::string& text, Layout layout, std::size_t dim = 0, std::size_t stride = 1) {
    std::istringstream in(text);
    DatasetDescriptor d;
    d.layout = layout;
    d.dim = dim;
    d.stride = stride;
    return parse_series(in, d);
}

std::string parse_error(const std::string& text, Layout layout) {
    try {
        parse(text, layout);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("columns") {
    const ObservedSeries s = parse("# header\n1 2\n\n3,4\n+5\t-6e0\n", Layout::Columns);
    CHECK(s.dim() == 2);
    CHECK(s.total_points() == 3);
    CHECK(s.points()(2, 0) == 5.0);
    CHECK(s.points()(2, 1) == -6.0);
    CHECK(s.kind() == DataKind::Linear);
    CHECK(parse("1 2 3\n4 5 6\n", Layout::Columns, 3).dim() == 3);
}

TEST_CASE("angles") {
    const ObservedSeries deg = parse("90\n180\n270\n", Layout::AnglesDegrees);
    CHECK(deg.kind() == DataKind::Circular);
    CHECK(deg.points()(0, 0) == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(deg.points()(1, 0) == doctest::Approx(std::numbers::pi));
    CHECK(deg.points()(2, 0) == doctest::Approx(3.0 * std::numbers::pi / 2.0));
    const ObservedSeries wrapped = parse("360\n-90\n720.5\n", Layout::AnglesDegrees);
    CHECK(wrapped.points()(0, 0) == doctest::Approx(0.0));
    CHECK(wrapped.points()(1, 0) == doctest::Approx(3.0 * std::numbers::pi / 2.0));
    CHECK(wrapped.points()(2, 0) == doctest::Approx(0.5 * std::numbers::pi / 180.0));
    const ObservedSeries rad = parse("7\n-1\n", Layout::AnglesRadians);
    CHECK(rad.points()(0, 0) == doctest::Approx(7.0 - 2.0 * std::numbers::pi));
    CHECK(rad.points()(1, 0) == doctest::Approx(2.0 * std::numbers::pi - 1.0));
}

TEST_CASE("multiple sequences") {
    std::ostringstream text;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    const std::size_t lens[] = {168, 134, 137};
    for (std::size_t id = 0; id < 3; ++id)
        for (std::size_t t = 0; t < lens[id]; ++t) text << (id + 10) << " " << z(rng) << "\n";
    const ObservedSeries s = parse(text.str(), Layout::MultiSequence);
    CHECK(s.sequence_lengths() == std::vector<std::size_t>{168, 134, 137});
    CHECK(s.n_pairs() == 436);

    // interleaved rows keep the order of first appearance
    const ObservedSeries mixed = parse("2 1.0\n1 5.0\n2 2.0\n1 6.0\n2 3.0\n", Layout::MultiSequence);
    CHECK(mixed.sequence_lengths() == std::vector<std::size_t>{3, 2});
    CHECK(mixed.points()(2, 0) == 3.0);
    CHECK(mixed.points()(3, 0) == 5.0);

    CHECK(parse_error("1 1.0\n1 2.0\n2 3.0\n", Layout::MultiSequence).find("sequence 2") != std::string::npos);
}

TEST_CASE("stride") {
    std::ostringstream text;
    for (int t = 0; t < 35064; ++t) text << t << "\n";
    const ObservedSeries s = parse(text.str(), Layout::Columns, 0, 6);
    CHECK(s.total_points() == 5844);
    CHECK(s.points()(1, 0) == 6.0);
    CHECK(parse(text.str(), Layout::Columns, 0, 4).total_points() == 8766);
}

TEST_CASE("malformed input") {
    CHECK(parse_error("1 2\n3\n", Layout::Columns).find("line 2") != std::string::npos);
    CHECK(parse_error("1\n2\nabc\n", Layout::Columns).find("line 3") != std::string::npos);
    CHECK(parse_error("# c\n1\n2x\n", Layout::Columns).find("line 3") != std::string::npos);
    CHECK(parse_error("1\nnan\n", Layout::Columns).find("line 2") != std::string::npos);
    CHECK(parse_error("1.5 2\n1.5 3\n", Layout::MultiSequence).find("line 1") != std::string::npos);
    CHECK_THROWS_AS(parse("1 2\n3 4\n", Layout::Columns, 3), ParseError);
    CHECK_THROWS_AS(parse("", Layout::Columns), ParseError);
    CHECK_THROWS_AS(load_series({"/nonexistent/file.txt"}), ParseError);
    CHECK_THROWS_AS(layout_from_string("json"), ConfigError);
}

TEST_CASE("round trip") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Eigen::MatrixXd p(50, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = z(rng) * 1e3;
    const auto dir = std::filesystem::temp_directory_path() / "hmmorder_io_test";
    std::filesystem::create_directories(dir);

    const ObservedSeries one(p);
    save_series(one, (dir / "one.txt").string());
    const ObservedSeries back = load_series({(dir / "one.txt").string()});
    CHECK(back.points() == one.points());

    const ObservedSeries two(p, {20, 30});
    save_series(two, (dir / "two.txt").string());
    DatasetDescriptor d{(dir / "two.txt").string(), Layout::MultiSequence};
    const ObservedSeries back2 = load_series(d);
    CHECK(back2.points() == two.points());
    CHECK(back2.sequence_lengths() == two.sequence_lengths());
    std::filesystem::remove_all(dir);
}

TEST_CASE("diagnostics export") {
    OrderEstimate e;
    e.r_values = {6.4, 4.0, 0.1};
    e.tau = 4.0;
    const std::string text = format_diagnostics(e);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "ell,r_ell,tau,exceeds");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].substr(0, 2) == "1,");
    CHECK(rows[0].back() == '1');
    CHECK(rows[1].back() == '0');  // tie
    CHECK(rows[2].back() == '0');
}

}  // TEST_SUITE
