#pragma once

#include "hmmorder/estimator.hpp"
#include "hmmorder/series.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>

namespace hmmorder {

enum class Layout { Columns, AnglesDegrees, AnglesRadians, MultiSequence };

/// "columns", "deg", "rad", "multiseq".
Layout layout_from_string(const std::string& name);

/// Text file, one time point per line, fields separated by whitespace or commas.
/// Blank lines and lines starting with '#' are skipped.
struct DatasetDescriptor {
    std::string path;
    Layout layout = Layout::Columns;
    /// Columns and MultiSequence; 0 infers it from the first data line.
    std::size_t dim = 0;
    /// Every stride-th observation of each sequence, applied before pairing.
    std::size_t stride = 1;
};

/// Angles are converted to radians in [0, 2pi). MultiSequence reads a leading integer id
/// column and groups rows by id in order of first appearance. Throws ParseError with the
/// offending line number.
ObservedSeries load_series(const DatasetDescriptor& desc);
ObservedSeries parse_series(std::istream& in, const DatasetDescriptor& desc);

/// %.17g, one point per line; several sequences get a leading id column (0, 1, ...).
void write_series(const ObservedSeries& series, std::ostream& out);
void save_series(const ObservedSeries& series, const std::string& path);

/// Columns ell, r_ell, tau, exceeds (strict r_ell > tau as 0/1), one row per ell.
std::string format_diagnostics(const OrderEstimate& estimate);
void export_diagnostics(const OrderEstimate& estimate, const std::string& path);

}  // namespace hmmorder
