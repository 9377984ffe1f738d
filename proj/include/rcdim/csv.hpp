#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcdim/dimension.hpp"
#include "rcdim/drivers.hpp"
#include "rcdim/jacobian.hpp"
#include "rcdim/pullback.hpp"

namespace rcdim::csv {

/// Shortest text that reads back to the same double.
std::string format_real(double value);
std::string format_optional(const std::optional<double>& value);
/// RFC-4180 quoting: fields containing a comma, quote or line break are quoted.
std::string quote(const std::string& field);
std::string join(const std::vector<std::string>& fields);
/// Splits one RFC-4180 record (no embedded line breaks).
std::vector<std::string> split(const std::string& line);

/// Header `dim=<N>,label=<tag>`, then one point per row.
void write_point_cloud(std::ostream& out, const PointCloud<double>& cloud);
PointCloud<double> read_point_cloud(std::istream& in);

/// Header `t,u1,u2,u3`, one row per sample.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
/// Header `u1,...,uk`, one row per time index.
void write_input_window(std::ostream& out, const InputWindow<double>& window);
/// Header `radius,value`.
void write_scaling_curve(std::ostream& out, const ScalingCurve& curve);

std::vector<std::string> spectrum_header();
std::vector<std::string> spectrum_row(const SpectrumReport<double>& report);
std::vector<std::string> rank_header();
std::vector<std::string> rank_row(const RankReport<double>& report);

}  // namespace rcdim::csv
