#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcdim/dimension.hpp"

namespace rcdim {

enum class ExperimentKind { LowerBound, UpperBound, RankSweep, Lyapunov };
enum class DriverKind { Lorenz, Rossler, Periodic, Zero };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(DriverKind kind);
DriverKind parse_driver_kind(const std::string& name);

struct ReservoirSpec {
  std::vector<int> state_dims{5};
  std::vector<double> target_norms{0.99};
  double leak_rate = 1.0;
  int seeds = 1;  ///< reservoir realisations per (state_dim, target_norm) cell
  bool zero_input_matrix = false;

  bool operator==(const ReservoirSpec&) const = default;
};

struct DriverSpec {
  DriverKind kind = DriverKind::Periodic;
  /// (sigma, rho, beta) for Lorenz, (a, b, c) for Rossler.
  std::array<double, 3> ode_parameters{10.0, 28.0, 8.0 / 3.0};
  int initial_count = 20;
  double initial_spread = 0.5;
  int period = 30;
  int input_dim = 2;
  int block_count = 50;
  bool zero_block = false;
  double input_low = 0.0;
  double input_high = 1.0;

  bool operator==(const DriverSpec&) const = default;
};

struct ObservationSpec {
  std::vector<std::vector<int>> coordinate_sets{{0, 1, 2}, {0}};
  double scale = 0.01;

  bool operator==(const ObservationSpec&) const = default;
};

struct RunSpec {
  double dt = 0.01;
  double t_end = 50.0;
  double t_transient = 10.0;
  double washout_fraction = 0.95;
  int steps = 0;  ///< driven steps; 0 means the whole trajectory
  double tolerance = 1e-12;
  int max_iterations = 100000;
  int renorm_every = 1;
  int lyapunov_washout = 500;
  int persistence_trials = 0;
  double persistence_radius = 1e-6;
  double rank_tolerance = 1e-10;
  bool driver_reference = true;

  bool operator==(const RunSpec&) const = default;
};

/// Declarative description of one experiment. Parsed from a line-oriented
/// `key = value` document with `[section]` headers.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::LowerBound;
  std::uint64_t seed = 1;
  int threads = 1;
  ReservoirSpec reservoir;
  DriverSpec driver;
  ObservationSpec observation;
  RunSpec run;
  EstimatorSettings dimension;
  std::string output_path = "results.csv";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse failure; `line` is 1-based (0 when the problem is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& key, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Defaults for an experiment kind (the values used for omitted keys).
ExperimentConfig default_config(ExperimentKind kind);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Writes every key explicitly; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// Throws ConfigError on constraint violations (line 0).
void validate_config(const ExperimentConfig& config);

}  // namespace rcdim
