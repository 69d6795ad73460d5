#include "hmmorder/io.hpp"

#include "hmmorder/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace hmmorder {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double parse_field(const std::string& field, std::size_t line_no) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ": '" + field + "' is not a finite number");
    return value;
}

long long parse_id(const std::string& field, std::size_t line_no) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": sequence id '" + field + "' is not an integer");
    return value;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Layout layout_from_string(const std::string& name) {
    if (name == "columns") return Layout::Columns;
    if (name == "deg") return Layout::AnglesDegrees;
    if (name == "rad") return Layout::AnglesRadians;
    if (name == "multiseq") return Layout::MultiSequence;
    throw ConfigError("unknown layout '" + name + "'");
}

ObservedSeries parse_series(std::istream& in, const DatasetDescriptor& desc) {
    if (desc.stride < 1) throw ConfigError("stride must be >= 1");
    const bool angles = desc.layout == Layout::AnglesDegrees || desc.layout == Layout::AnglesRadians;
    const bool multi = desc.layout == Layout::MultiSequence;
    if (angles && desc.dim > 1) throw ConfigError("angle layouts are univariate");
    std::size_t dim = angles ? 1 : desc.dim;

    std::vector<long long> order;                     // ids by first appearance
    std::map<long long, std::vector<double>> groups;  // row-major values per id
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::vector<std::string> fields = split_fields(line);
        const std::size_t offset = multi ? 1 : 0;
        if (dim == 0) {
            if (fields.size() <= offset) throw ParseError("line " + std::to_string(line_no) + ": no data columns");
            dim = fields.size() - offset;
        }
        if (fields.size() != dim + offset)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + offset) +
                             " fields, found " + std::to_string(fields.size()));
        const long long id = multi ? parse_id(fields[0], line_no) : 0;
        auto [it, inserted] = groups.try_emplace(id);
        if (inserted) order.push_back(id);
        for (std::size_t j = 0; j < dim; ++j) {
            double v = parse_field(fields[offset + j], line_no);
            if (desc.layout == Layout::AnglesDegrees) {
                v = std::fmod(v, 360.0);
                if (v < 0.0) v += 360.0;
                v = wrap_angle(v * std::numbers::pi / 180.0);
            } else if (desc.layout == Layout::AnglesRadians) {
                v = wrap_angle(v);
            }
            it->second.push_back(v);
        }
    }
    if (order.empty()) throw ParseError("no observations found");

    std::size_t total = 0;
    for (long long id : order) {
        const std::size_t points = groups[id].size() / dim;
        if (points < 2)
            throw ParseError("sequence " + std::to_string(id) + " has " + std::to_string(points) +
                             " observation(s); at least two are needed");
        total += points;
    }
    Eigen::MatrixXd data(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(dim));
    std::vector<std::size_t> lengths;
    Eigen::Index row = 0;
    for (long long id : order) {
        const auto& values = groups[id];
        const std::size_t points = values.size() / dim;
        lengths.push_back(points);
        for (std::size_t t = 0; t < points; ++t, ++row)
            for (std::size_t j = 0; j < dim; ++j) data(row, static_cast<Eigen::Index>(j)) = values[t * dim + j];
    }
    ObservedSeries series(std::move(data), std::move(lengths), angles ? DataKind::Circular : DataKind::Linear);
    return desc.stride > 1 ? series.subsample(desc.stride) : series;
}

ObservedSeries load_series(const DatasetDescriptor& desc) {
    std::ifstream in(desc.path);
    if (!in) throw ParseError("cannot open '" + desc.path + "'");
    return parse_series(in, desc);
}

void write_series(const ObservedSeries& series, std::ostream& out) {
    const auto& pts = series.points();
    const bool multi = series.num_sequences() > 1;
    Eigen::Index row = 0;
    for (std::size_t s = 0; s < series.num_sequences(); ++s) {
        for (std::size_t t = 0; t < series.sequence_lengths()[s]; ++t, ++row) {
            std::string line = multi ? std::to_string(s) + " " : std::string();
            for (Eigen::Index j = 0; j < pts.cols(); ++j) {
                if (j) line += ' ';
                line += fmt17(pts(row, j));
            }
            out << line << '\n';
        }
    }
}

void save_series(const ObservedSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_series(series, out);
    if (!out) throw ParseError("write to '" + path + "' failed");
}

std::string format_diagnostics(const OrderEstimate& estimate) {
    std::string out = "ell,r_ell,tau,exceeds\n";
    for (std::size_t l = 0; l < estimate.r_values.size(); ++l) {
        const double r = estimate.r_values[l];
        out += std::to_string(l + 1) + "," + fmt17(r) + "," + fmt17(estimate.tau) + "," + (r > estimate.tau ? "1" : "0") +
               "\n";
    }
    return out;
}

void export_diagnostics(const OrderEstimate& estimate, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << format_diagnostics(estimate);
    if (!out) throw ParseError("write to '" + path + "' failed");
}

}  // namespace hmmorder
