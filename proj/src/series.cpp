#include "hmmorder/series.hpp"

#include "hmmorder/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace hmmorder {

double wrap_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(radians, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod of a tiny negative number can round up to exactly 2pi
    if (r >= two_pi) r = 0.0;
    return r;
}

ObservedSeries::ObservedSeries(Eigen::MatrixXd points, DataKind kind)
    : points_(std::move(points)), lengths_{static_cast<std::size_t>(points_.rows())}, kind_(kind) {
    validate();
}

ObservedSeries::ObservedSeries(Eigen::MatrixXd points, std::vector<std::size_t> lengths, DataKind kind)
    : points_(std::move(points)), lengths_(std::move(lengths)), kind_(kind) {
    validate();
}

ObservedSeries ObservedSeries::univariate(const std::vector<double>& values, DataKind kind) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = values[i];
    return ObservedSeries(std::move(pts), kind);
}

void ObservedSeries::validate() const {
    if (lengths_.empty()) throw ShapeError("series has no sequence");
    if (points_.cols() < 1) throw ShapeError("series points must have dimension >= 1");
    std::size_t total = 0;
    for (std::size_t s = 0; s < lengths_.size(); ++s) {
        if (lengths_[s] < 2)
            throw ShapeError("sequence " + std::to_string(s) + " has " + std::to_string(lengths_[s]) +
                             " point(s); at least 2 are required");
        total += lengths_[s];
    }
    if (total != static_cast<std::size_t>(points_.rows()))
        throw ShapeError("sequence lengths sum to " + std::to_string(total) + " but " +
                         std::to_string(points_.rows()) + " points were given");
    if (!points_.allFinite()) throw DomainError("series contains non-finite values");
    if (kind_ == DataKind::Circular) {
        if (points_.cols() != 1) throw ShapeError("circular series must be univariate");
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (Eigen::Index i = 0; i < points_.rows(); ++i) {
            const double a = points_(i, 0);
            if (a < 0.0 || a >= two_pi)
                throw DomainError("circular value at index " + std::to_string(i) + " outside [0, 2pi)");
        }
    }
}

ObservedSeries ObservedSeries::coordinate(std::size_t j) const {
    if (j >= dim()) throw ShapeError("coordinate index out of range");
    return ObservedSeries(points_.col(static_cast<Eigen::Index>(j)), lengths_, kind_);
}

ObservedSeries ObservedSeries::subsample(std::size_t stride) const {
    if (stride < 1) throw ConfigError("subsample stride must be >= 1");
    std::vector<std::size_t> new_lengths;
    std::vector<Eigen::Index> rows;
    std::size_t offset = 0;
    for (const std::size_t len : lengths_) {
        std::size_t kept = 0;
        for (std::size_t t = 0; t < len; t += stride) {
            rows.push_back(static_cast<Eigen::Index>(offset + t));
            ++kept;
        }
        new_lengths.push_back(kept);
        offset += len;
    }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), points_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = points_.row(rows[i]);
    return ObservedSeries(std::move(pts), std::move(new_lengths), kind_);
}

ObservedSeries ObservedSeries::time_reversed() const {
    Eigen::MatrixXd pts(points_.rows(), points_.cols());
    std::size_t offset = 0;
    for (const std::size_t len : lengths_) {
        for (std::size_t t = 0; t < len; ++t)
            pts.row(static_cast<Eigen::Index>(offset + t)) = points_.row(static_cast<Eigen::Index>(offset + len - 1 - t));
        offset += len;
    }
    return ObservedSeries(std::move(pts), lengths_, kind_);
}

PairSelectors build_selectors(const ObservedSeries& series) {
    PairSelectors sel;
    sel.first.reserve(series.n_pairs());
    sel.second.reserve(series.n_pairs());
    Eigen::Index offset = 0;
    for (const std::size_t len : series.sequence_lengths()) {
        for (std::size_t t = 0; t + 1 < len; ++t) {
            sel.first.push_back(offset + static_cast<Eigen::Index>(t));
            sel.second.push_back(offset + static_cast<Eigen::Index>(t) + 1);
        }
        offset += static_cast<Eigen::Index>(len);
    }
    return sel;
}

}  // namespace hmmorder
