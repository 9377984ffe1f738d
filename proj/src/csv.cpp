#include "rcdim/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rcdim::csv {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_real(*value) : std::string();
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote(fields[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

namespace {

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("csv: not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("csv: not a number: '" + text + "'");
  return v;
}

}  // namespace

void write_point_cloud(std::ostream& out, const PointCloud<double>& cloud) {
  out << "dim=" << cloud.dim() << ",label=" << cloud.label << '\n';
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index k = 0; k < cloud.dim(); ++k) {
      if (k) out << ',';
      out << format_real(cloud.points(i, k));
    }
    out << '\n';
  }
}

PointCloud<double> read_point_cloud(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("point cloud csv: missing header");
  const auto header = split(line);
  if (header.size() != 2 || header[0].rfind("dim=", 0) != 0 || header[1].rfind("label=", 0) != 0)
    throw std::invalid_argument("point cloud csv: header must be 'dim=<N>,label=<tag>'");
  const long dim = std::stol(header[0].substr(4));
  if (dim < 1) throw std::invalid_argument("point cloud csv: dim must be >= 1");
  PointCloud<double> cloud;
  cloud.label = header[1].substr(6);
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (static_cast<long>(fields.size()) != dim)
      throw std::invalid_argument("point cloud csv: row " + std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(dim));
    for (const auto& f : fields) values.push_back(parse_real(f));
  }
  const auto n = static_cast<Eigen::Index>(values.size() / static_cast<std::size_t>(dim));
  cloud.points = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, dim);
  return cloud;
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << "t,u1,u2,u3\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double t = trajectory.t_start + static_cast<double>(k) * trajectory.dt;
    const auto& p = trajectory.points[k];
    out << format_real(t) << ',' << format_real(p[0]) << ',' << format_real(p[1]) << ','
        << format_real(p[2]) << '\n';
  }
}

void write_input_window(std::ostream& out, const InputWindow<double>& window) {
  for (Eigen::Index i = 0; i < window.dim(); ++i) out << (i ? ",u" : "u") << i + 1;
  out << '\n';
  for (Eigen::Index k = 0; k < window.length(); ++k) {
    for (Eigen::Index i = 0; i < window.dim(); ++i) {
      if (i) out << ',';
      out << format_real(window.vectors(i, k));
    }
    out << '\n';
  }
}

void write_scaling_curve(std::ostream& out, const ScalingCurve& curve) {
  out << "radius,value\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << format_real(curve.radii[i]) << ',' << format_real(curve.values[i]) << '\n';
}

std::vector<std::string> spectrum_header() {
  return {"steps_used", "dimension_bound", "capped_count", "exponents"};
}

std::vector<std::string> spectrum_row(const SpectrumReport<double>& report) {
  std::string ex;
  int capped = 0;
  for (std::size_t i = 0; i < report.exponents.size(); ++i) {
    if (i) ex += ' ';
    ex += format_real(report.exponents[i]);
    if (report.capped[i]) ++capped;
  }
  return {std::to_string(report.steps_used), format_real(report.dimension_bound),
          std::to_string(capped), ex};
}

std::vector<std::string> rank_header() {
  return {"rows", "cols", "numerical_rank", "tolerance_used", "full_rank", "singular_values"};
}

std::vector<std::string> rank_row(const RankReport<double>& report) {
  std::string sv;
  for (std::size_t i = 0; i < report.singular_values.size(); ++i) {
    if (i) sv += ' ';
    sv += format_real(report.singular_values[i]);
  }
  return {std::to_string(report.matrix_rows), std::to_string(report.matrix_cols),
          std::to_string(report.numerical_rank), format_real(report.tolerance_used),
          report.full_rank ? "true" : "false", sv};
}

}  // namespace rcdim::csv
