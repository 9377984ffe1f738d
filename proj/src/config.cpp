#include "rcdim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rcdim/csv.hpp"

namespace rcdim {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::LowerBound: return "lower-bound";
    case ExperimentKind::UpperBound: return "upper-bound";
    case ExperimentKind::RankSweep: return "rank-sweep";
    case ExperimentKind::Lyapunov: return "lyapunov";
  }
  return "lower-bound";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "lower-bound") return ExperimentKind::LowerBound;
  if (name == "upper-bound") return ExperimentKind::UpperBound;
  if (name == "rank-sweep") return ExperimentKind::RankSweep;
  if (name == "lyapunov") return ExperimentKind::Lyapunov;
  throw std::invalid_argument("expected lower-bound|upper-bound|rank-sweep|lyapunov");
}

std::string to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::Lorenz: return "lorenz";
    case DriverKind::Rossler: return "rossler";
    case DriverKind::Periodic: return "periodic";
    case DriverKind::Zero: return "zero";
  }
  return "periodic";
}

DriverKind parse_driver_kind(const std::string& name) {
  if (name == "lorenz") return DriverKind::Lorenz;
  if (name == "rossler") return DriverKind::Rossler;
  if (name == "periodic") return DriverKind::Periodic;
  if (name == "zero") return DriverKind::Zero;
  throw std::invalid_argument("expected lorenz|rossler|periodic|zero");
}

ConfigError::ConfigError(std::size_t line, const std::string& key, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : "'" + key + "': ") + message),
      line_(line),
      key_(key) {}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

void set_ode_defaults(DriverSpec& d) {
  if (d.kind == DriverKind::Rossler)
    d.ode_parameters = {0.2, 0.2, 5.7};
  else
    d.ode_parameters = {10.0, 28.0, 8.0 / 3.0};
}

}  // namespace

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::LowerBound:
      c.driver.kind = DriverKind::Periodic;
      c.dimension.standardize = Standardize::Whiten;
      c.dimension.lower_rule = LowerRadiusRule::MinPairs;
      c.dimension.lower_parameter = 50;
      c.dimension.range = FitRange::small_scale();
      c.output_path = "lower_bound.csv";
      break;
    case ExperimentKind::UpperBound:
      c.driver.kind = DriverKind::Lorenz;
      c.reservoir.state_dims = {10, 20, 30};
      c.reservoir.target_norms = linspace(0.05, 1.5, 30);
      c.output_path = "upper_bound.csv";
      break;
    case ExperimentKind::RankSweep:
      c.driver.kind = DriverKind::Periodic;
      c.reservoir.seeds = 100;
      c.output_path = "rank_sweep.csv";
      break;
    case ExperimentKind::Lyapunov:
      c.driver.kind = DriverKind::Lorenz;
      c.reservoir.state_dims = {10};
      c.reservoir.target_norms = {0.5};
      c.observation.coordinate_sets = {{0, 1, 2}};
      c.output_path = "lyapunov.csv";
      break;
  }
  set_ode_defaults(c.driver);
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("expected an integer");
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  if (v.empty() || v[0] == '-') throw std::invalid_argument("expected a non-negative integer");
  std::size_t used = 0;
  const unsigned long long x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument("expected a non-negative integer");
  return x;
}

double to_real(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument("expected a finite real");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("expected true|false");
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_on(v, ',')) out.push_back(static_cast<int>(to_int(item)));
  return out;
}

std::vector<double> to_real_list(const std::string& v) {
  if (v.rfind("linspace(", 0) == 0 && v.back() == ')') {
    const auto parts = split_on(v.substr(9, v.size() - 10), ',');
    if (parts.size() != 3) throw std::invalid_argument("linspace takes (start, stop, count)");
    const auto n = to_int(parts[2]);
    if (n < 1) throw std::invalid_argument("linspace count must be >= 1");
    return linspace(to_real(parts[0]), to_real(parts[1]), static_cast<int>(n));
  }
  std::vector<double> out;
  for (const auto& item : split_on(v, ',')) out.push_back(to_real(item));
  return out;
}

std::vector<std::vector<int>> to_coordinate_sets(const std::string& v) {
  std::vector<std::vector<int>> out;
  for (const auto& set : split_on(v, ';')) out.push_back(to_int_list(set));
  return out;
}

struct Entry {
  std::size_t line;
  std::string section;
  std::string key;
  std::string value;
};

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

/// Every accepted key. Anything else is rejected.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.kind", [](auto& c, const auto& v) { c.experiment = parse_experiment_kind(v); }},
      {"experiment.seed", [](auto& c, const auto& v) { c.seed = to_u64(v); }},
      {"experiment.threads", [](auto& c, const auto& v) { c.threads = static_cast<int>(to_int(v)); }},
      {"reservoir.state_dim", [](auto& c, const auto& v) { c.reservoir.state_dims = to_int_list(v); }},
      {"reservoir.target_norm", [](auto& c, const auto& v) { c.reservoir.target_norms = to_real_list(v); }},
      {"reservoir.leak_rate", [](auto& c, const auto& v) { c.reservoir.leak_rate = to_real(v); }},
      {"reservoir.seeds", [](auto& c, const auto& v) { c.reservoir.seeds = static_cast<int>(to_int(v)); }},
      {"reservoir.zero_input_matrix", [](auto& c, const auto& v) { c.reservoir.zero_input_matrix = to_bool(v); }},
      {"driver.kind", [](auto& c, const auto& v) { c.driver.kind = parse_driver_kind(v); }},
      {"driver.sigma", [](auto& c, const auto& v) { c.driver.ode_parameters[0] = to_real(v); }},
      {"driver.rho", [](auto& c, const auto& v) { c.driver.ode_parameters[1] = to_real(v); }},
      {"driver.beta", [](auto& c, const auto& v) { c.driver.ode_parameters[2] = to_real(v); }},
      {"driver.a", [](auto& c, const auto& v) { c.driver.ode_parameters[0] = to_real(v); }},
      {"driver.b", [](auto& c, const auto& v) { c.driver.ode_parameters[1] = to_real(v); }},
      {"driver.c", [](auto& c, const auto& v) { c.driver.ode_parameters[2] = to_real(v); }},
      {"driver.initial_count", [](auto& c, const auto& v) { c.driver.initial_count = static_cast<int>(to_int(v)); }},
      {"driver.initial_spread", [](auto& c, const auto& v) { c.driver.initial_spread = to_real(v); }},
      {"driver.period", [](auto& c, const auto& v) { c.driver.period = static_cast<int>(to_int(v)); }},
      {"driver.input_dim", [](auto& c, const auto& v) { c.driver.input_dim = static_cast<int>(to_int(v)); }},
      {"driver.block_count", [](auto& c, const auto& v) { c.driver.block_count = static_cast<int>(to_int(v)); }},
      {"driver.zero_block", [](auto& c, const auto& v) { c.driver.zero_block = to_bool(v); }},
      {"driver.input_low", [](auto& c, const auto& v) { c.driver.input_low = to_real(v); }},
      {"driver.input_high", [](auto& c, const auto& v) { c.driver.input_high = to_real(v); }},
      {"observation.coordinates", [](auto& c, const auto& v) { c.observation.coordinate_sets = to_coordinate_sets(v); }},
      {"observation.scale", [](auto& c, const auto& v) { c.observation.scale = to_real(v); }},
      {"run.dt", [](auto& c, const auto& v) { c.run.dt = to_real(v); }},
      {"run.t_end", [](auto& c, const auto& v) { c.run.t_end = to_real(v); }},
      {"run.t_transient", [](auto& c, const auto& v) { c.run.t_transient = to_real(v); }},
      {"run.washout_fraction", [](auto& c, const auto& v) { c.run.washout_fraction = to_real(v); }},
      {"run.steps", [](auto& c, const auto& v) { c.run.steps = static_cast<int>(to_int(v)); }},
      {"run.tolerance", [](auto& c, const auto& v) { c.run.tolerance = to_real(v); }},
      {"run.max_iterations", [](auto& c, const auto& v) { c.run.max_iterations = static_cast<int>(to_int(v)); }},
      {"run.renorm_every", [](auto& c, const auto& v) { c.run.renorm_every = static_cast<int>(to_int(v)); }},
      {"run.lyapunov_washout", [](auto& c, const auto& v) { c.run.lyapunov_washout = static_cast<int>(to_int(v)); }},
      {"run.persistence_trials", [](auto& c, const auto& v) { c.run.persistence_trials = static_cast<int>(to_int(v)); }},
      {"run.persistence_radius", [](auto& c, const auto& v) { c.run.persistence_radius = to_real(v); }},
      {"run.rank_tolerance", [](auto& c, const auto& v) { c.run.rank_tolerance = to_real(v); }},
      {"run.driver_reference", [](auto& c, const auto& v) { c.run.driver_reference = to_bool(v); }},
      {"dimension.method", [](auto& c, const auto& v) { c.dimension.method = parse_dimension_method(v); }},
      {"dimension.radii", [](auto& c, const auto& v) { c.dimension.radii_count = static_cast<int>(to_int(v)); }},
      {"dimension.lower", [](auto& c, const auto& v) { c.dimension.lower_rule = parse_lower_rule(v); }},
      {"dimension.lower_parameter", [](auto& c, const auto& v) { c.dimension.lower_parameter = to_real(v); }},
      {"dimension.range", [](auto& c, const auto& v) { c.dimension.range = parse_fit_range(v); }},
      {"dimension.theiler", [](auto& c, const auto& v) { c.dimension.theiler_window = static_cast<int>(to_int(v)); }},
      {"dimension.standardize", [](auto& c, const auto& v) { c.dimension.standardize = parse_standardize(v); }},
      {"dimension.max_points", [](auto& c, const auto& v) { c.dimension.max_points = to_int(v); }},
      {"dimension.slope_tolerance", [](auto& c, const auto& v) { c.dimension.fit.slope_tolerance = to_real(v); }},
      {"dimension.min_window", [](auto& c, const auto& v) { c.dimension.fit.min_window = to_int(v); }},
      {"dimension.small_scale_window", [](auto& c, const auto& v) { c.dimension.fit.small_scale_window = to_int(v); }},
      {"output.path", [](auto& c, const auto& v) { c.output_path = v; }},
  };
  return table;
}

const std::vector<std::string> kSections = {"experiment", "reservoir", "driver", "observation",
                                            "run", "dimension", "output"};

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw ConfigError(line_no, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    if (section.empty()) throw ConfigError(line_no, key, "key outside of any [section]");
    if (value.empty()) throw ConfigError(line_no, section + "." + key, "missing value");
    entries.push_back({line_no, section, key, value});
  }
  return entries;
}

bool is_ode_key(const std::string& k) {
  return k == "driver.sigma" || k == "driver.rho" || k == "driver.beta" || k == "driver.a" ||
         k == "driver.b" || k == "driver.c";
}

using LineMap = std::map<std::string, std::size_t>;

void check(bool ok, const LineMap& lines, const std::string& key, const std::string& message) {
  if (ok) return;
  const auto it = lines.find(key);
  throw ConfigError(it == lines.end() ? 0 : it->second, key, message);
}

void validate_with_lines(const ExperimentConfig& c, const LineMap& lines) {
  const auto& r = c.reservoir;
  check(c.threads >= 1, lines, "experiment.threads", "must be >= 1");
  check(!r.state_dims.empty(), lines, "reservoir.state_dim", "needs at least one value");
  for (int n : r.state_dims) check(n >= 1, lines, "reservoir.state_dim", "must be >= 1");
  check(!r.target_norms.empty(), lines, "reservoir.target_norm", "needs at least one value");
  for (double v : r.target_norms) check(v > 0.0, lines, "reservoir.target_norm", "must be > 0");
  check(r.leak_rate > 0.0 && r.leak_rate <= 1.0, lines, "reservoir.leak_rate", "must lie in (0,1]");
  check(r.seeds >= 1, lines, "reservoir.seeds", "must be >= 1");

  const auto& d = c.driver;
  check(d.initial_count >= 1, lines, "driver.initial_count", "must be >= 1");
  check(d.initial_spread >= 0.0, lines, "driver.initial_spread", "must be >= 0");
  check(d.period >= 1, lines, "driver.period", "must be >= 1");
  check(d.input_dim >= 1, lines, "driver.input_dim", "must be >= 1");
  check(d.block_count >= 1, lines, "driver.block_count", "must be >= 1");
  check(d.input_low <= d.input_high, lines, "driver.input_high", "must be >= input_low");

  const bool ode = d.kind == DriverKind::Lorenz || d.kind == DriverKind::Rossler;
  const bool periodic = d.kind == DriverKind::Periodic;
  switch (c.experiment) {
    case ExperimentKind::LowerBound:
    case ExperimentKind::RankSweep:
      check(periodic, lines, "driver.kind", "this experiment needs driver.kind = periodic");
      for (int n : r.state_dims)
        check(static_cast<long long>(d.period) * d.input_dim >= n, lines,
              lines.count("driver.period") ? "driver.period" : "reservoir.state_dim",
              "requires period * input_dim >= state_dim (" + std::to_string(d.period) + " * " +
                  std::to_string(d.input_dim) + " < " + std::to_string(n) + ")");
      break;
    case ExperimentKind::UpperBound:
      check(ode || d.kind == DriverKind::Zero, lines, "driver.kind",
            "upper-bound needs driver.kind = lorenz|rossler|zero");
      break;
    case ExperimentKind::Lyapunov:
      break;
  }

  const auto& o = c.observation;
  check(!o.coordinate_sets.empty(), lines, "observation.coordinates", "needs at least one set");
  for (const auto& set : o.coordinate_sets) {
    check(!set.empty(), lines, "observation.coordinates", "empty coordinate set");
    for (int k : set) check(k >= 0 && k <= 2, lines, "observation.coordinates", "indices must be 0, 1 or 2");
  }

  const auto& u = c.run;
  check(u.dt > 0.0, lines, "run.dt", "must be > 0");
  check(u.t_transient < u.t_end, lines, "run.t_transient", "must be < t_end");
  check(u.washout_fraction > 0.0 && u.washout_fraction < 1.0, lines, "run.washout_fraction",
        "must lie in (0,1)");
  check(u.steps >= 0, lines, "run.steps", "must be >= 0");
  check(u.tolerance > 0.0, lines, "run.tolerance", "must be > 0");
  check(u.max_iterations >= 1, lines, "run.max_iterations", "must be >= 1");
  check(u.renorm_every >= 1, lines, "run.renorm_every", "must be >= 1");
  check(u.lyapunov_washout >= 0, lines, "run.lyapunov_washout", "must be >= 0");
  check(u.persistence_trials >= 0, lines, "run.persistence_trials", "must be >= 0");
  check(u.persistence_radius >= 0.0, lines, "run.persistence_radius", "must be >= 0");
  check(u.rank_tolerance > 0.0, lines, "run.rank_tolerance", "must be > 0");

  const auto& e = c.dimension;
  check(e.radii_count >= 4, lines, "dimension.radii", "must be >= 4");
  if (e.lower_rule == LowerRadiusRule::Percentile)
    check(e.lower_parameter > 0.0 && e.lower_parameter < 1.0, lines, "dimension.lower_parameter",
          "percentile must lie in (0,1)");
  else
    check(e.lower_parameter >= 1.0, lines, "dimension.lower_parameter", "min-pairs must be >= 1");
  check(e.theiler_window >= 0, lines, "dimension.theiler", "must be >= 0");
  check(e.max_points >= 2, lines, "dimension.max_points", "must be >= 2");
  check(e.fit.slope_tolerance > 0.0, lines, "dimension.slope_tolerance", "must be > 0");
  check(e.fit.min_window >= 4, lines, "dimension.min_window", "must be >= 4");
  check(e.fit.small_scale_window >= 4, lines, "dimension.small_scale_window", "must be >= 4");
  check(!c.output_path.empty(), lines, "output.path", "must not be empty");
}

}  // namespace

void validate_config(const ExperimentConfig& config) { validate_with_lines(config, {}); }

ExperimentConfig parse_config(const std::string& text) {
  const auto entries = tokenize(text);
  LineMap lines;
  for (const auto& e : entries) {
    const std::string full = e.section + "." + e.key;
    if (!setters().count(full)) throw ConfigError(e.line, full, "unknown key");
    if (lines.count(full)) throw ConfigError(e.line, full, "duplicate key");
    lines[full] = e.line;
  }

  // The experiment and driver kinds select the defaults, so they go first.
  ExperimentKind kind = ExperimentKind::LowerBound;
  bool kind_given = false;
  for (const auto& e : entries) {
    if (e.section == "experiment" && e.key == "kind") {
      try {
        kind = parse_experiment_kind(e.value);
      } catch (const std::exception& ex) {
        throw ConfigError(e.line, "experiment.kind", ex.what());
      }
      kind_given = true;
    }
  }
  if (!kind_given) throw ConfigError(0, "experiment.kind", "missing required key");
  ExperimentConfig cfg = default_config(kind);
  for (const auto& e : entries) {
    if (e.section == "driver" && e.key == "kind") {
      try {
        cfg.driver.kind = parse_driver_kind(e.value);
      } catch (const std::exception& ex) {
        throw ConfigError(e.line, "driver.kind", ex.what());
      }
      set_ode_defaults(cfg.driver);
    }
  }

  for (const auto& e : entries) {
    const std::string full = e.section + "." + e.key;
    if (is_ode_key(full)) {
      const bool lorenz_key = full == "driver.sigma" || full == "driver.rho" || full == "driver.beta";
      const bool ok = (lorenz_key && cfg.driver.kind == DriverKind::Lorenz) ||
                      (!lorenz_key && cfg.driver.kind == DriverKind::Rossler);
      if (!ok) throw ConfigError(e.line, full, "parameter does not belong to driver " + to_string(cfg.driver.kind));
    }
    try {
      setters().at(full)(cfg, e.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(e.line, full, std::string("bad value '") + e.value + "': " + ex.what());
    }
  }
  validate_with_lines(cfg, lines);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  using csv::format_real;
  std::ostringstream out;
  auto list = [](const auto& values, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + fmt(values[i]);
    return s;
  };
  auto int_fmt = [](int v) { return std::to_string(v); };
  auto bool_fmt = [](bool b) { return std::string(b ? "true" : "false"); };

  out << "[experiment]\n"
      << "kind = " << to_string(c.experiment) << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n\n";
  out << "[reservoir]\n"
      << "state_dim = " << list(c.reservoir.state_dims, int_fmt) << "\n"
      << "target_norm = " << list(c.reservoir.target_norms, format_real) << "\n"
      << "leak_rate = " << format_real(c.reservoir.leak_rate) << "\n"
      << "seeds = " << c.reservoir.seeds << "\n"
      << "zero_input_matrix = " << bool_fmt(c.reservoir.zero_input_matrix) << "\n\n";
  out << "[driver]\n" << "kind = " << to_string(c.driver.kind) << "\n";
  if (c.driver.kind == DriverKind::Lorenz)
    out << "sigma = " << format_real(c.driver.ode_parameters[0]) << "\n"
        << "rho = " << format_real(c.driver.ode_parameters[1]) << "\n"
        << "beta = " << format_real(c.driver.ode_parameters[2]) << "\n";
  if (c.driver.kind == DriverKind::Rossler)
    out << "a = " << format_real(c.driver.ode_parameters[0]) << "\n"
        << "b = " << format_real(c.driver.ode_parameters[1]) << "\n"
        << "c = " << format_real(c.driver.ode_parameters[2]) << "\n";
  out << "initial_count = " << c.driver.initial_count << "\n"
      << "initial_spread = " << format_real(c.driver.initial_spread) << "\n"
      << "period = " << c.driver.period << "\n"
      << "input_dim = " << c.driver.input_dim << "\n"
      << "block_count = " << c.driver.block_count << "\n"
      << "zero_block = " << bool_fmt(c.driver.zero_block) << "\n"
      << "input_low = " << format_real(c.driver.input_low) << "\n"
      << "input_high = " << format_real(c.driver.input_high) << "\n\n";
  std::string sets;
  for (std::size_t i = 0; i < c.observation.coordinate_sets.size(); ++i)
    sets += (i ? "; " : "") + list(c.observation.coordinate_sets[i], int_fmt);
  out << "[observation]\n"
      << "coordinates = " << sets << "\n"
      << "scale = " << format_real(c.observation.scale) << "\n\n";
  out << "[run]\n"
      << "dt = " << format_real(c.run.dt) << "\n"
      << "t_end = " << format_real(c.run.t_end) << "\n"
      << "t_transient = " << format_real(c.run.t_transient) << "\n"
      << "washout_fraction = " << format_real(c.run.washout_fraction) << "\n"
      << "steps = " << c.run.steps << "\n"
      << "tolerance = " << format_real(c.run.tolerance) << "\n"
      << "max_iterations = " << c.run.max_iterations << "\n"
      << "renorm_every = " << c.run.renorm_every << "\n"
      << "lyapunov_washout = " << c.run.lyapunov_washout << "\n"
      << "persistence_trials = " << c.run.persistence_trials << "\n"
      << "persistence_radius = " << format_real(c.run.persistence_radius) << "\n"
      << "rank_tolerance = " << format_real(c.run.rank_tolerance) << "\n"
      << "driver_reference = " << bool_fmt(c.run.driver_reference) << "\n\n";
  out << "[dimension]\n"
      << "method = " << to_string(c.dimension.method) << "\n"
      << "radii = " << c.dimension.radii_count << "\n"
      << "lower = " << to_string(c.dimension.lower_rule) << "\n"
      << "lower_parameter = " << format_real(c.dimension.lower_parameter) << "\n"
      << "range = " << to_string(c.dimension.range) << "\n"
      << "theiler = " << c.dimension.theiler_window << "\n"
      << "standardize = " << to_string(c.dimension.standardize) << "\n"
      << "max_points = " << c.dimension.max_points << "\n"
      << "slope_tolerance = " << format_real(c.dimension.fit.slope_tolerance) << "\n"
      << "min_window = " << c.dimension.fit.min_window << "\n"
      << "small_scale_window = " << c.dimension.fit.small_scale_window << "\n\n";
  out << "[output]\n" << "path = " << c.output_path << "\n";
  return out.str();
}

}  // namespace rcdim
