#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hmmorder {

enum class DataKind { Linear, Circular };

/// One or several independent contiguous sequences of d-dimensional observations,
/// stored row-wise in a single (N x d) matrix. Circular data are angles in [0, 2pi).
class ObservedSeries {
public:
    ObservedSeries() = default;

    /// Single sequence. Throws ShapeError / DomainError when the invariants fail.
    ObservedSeries(Eigen::MatrixXd points, DataKind kind = DataKind::Linear);

    /// Several sequences stacked row-wise; `lengths` gives the number of points of each.
    ObservedSeries(Eigen::MatrixXd points, std::vector<std::size_t> lengths, DataKind kind = DataKind::Linear);

    static ObservedSeries univariate(const std::vector<double>& values, DataKind kind = DataKind::Linear);

    const Eigen::MatrixXd& points() const { return points_; }
    const std::vector<std::size_t>& sequence_lengths() const { return lengths_; }
    DataKind kind() const { return kind_; }

    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    std::size_t num_sequences() const { return lengths_.size(); }
    /// Total number of points N = sum_s (n_s + 1).
    std::size_t total_points() const { return static_cast<std::size_t>(points_.rows()); }
    /// Total number of within-sequence consecutive pairs n = sum_s n_s.
    std::size_t n_pairs() const { return total_points() - num_sequences(); }

    /// Univariate series made of coordinate j, same sequence structure.
    ObservedSeries coordinate(std::size_t j) const;

    /// Every k-th observation of each sequence (k >= 1), starting with the first.
    ObservedSeries subsample(std::size_t stride) const;

    /// Sequences in reverse time order.
    ObservedSeries time_reversed() const;

private:
    void validate() const;

    Eigen::MatrixXd points_;
    std::vector<std::size_t> lengths_;
    DataKind kind_ = DataKind::Linear;
};

/// Zero-based point indices of the two members of every consecutive pair.
/// `second[k] == first[k] + 1` and no pair crosses a sequence boundary.
struct PairSelectors {
    std::vector<Eigen::Index> first;
    std::vector<Eigen::Index> second;

    std::size_t size() const { return first.size(); }
};

PairSelectors build_selectors(const ObservedSeries& series);

/// Wraps an angle to [0, 2pi).
double wrap_angle(double radians);

}  // namespace hmmorder
