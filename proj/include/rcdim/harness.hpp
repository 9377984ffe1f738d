#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcdim/config.hpp"
#include "rcdim/dimension.hpp"
#include "rcdim/drivers.hpp"
#include "rcdim/jacobian.hpp"
#include "rcdim/pullback.hpp"
#include "rcdim/reservoir.hpp"

namespace rcdim {

/// One output record. Columns shared by the whole run (integration and
/// estimator settings) are taken from the config when the CSV is written.
struct ResultRow {
  ExperimentKind experiment = ExperimentKind::LowerBound;
  std::uint64_t master_seed = 0;
  int seed_index = 0;
  std::uint64_t reservoir_seed = 0;
  int state_dim = 0;
  int input_dim = 0;
  double target_norm = 0.0;
  std::string coordinates;  ///< observed driver coordinates, space separated
  std::string status = "ok";

  std::optional<double> dimension_estimate;
  std::optional<double> fit_residual;
  std::optional<double> point_count;
  std::optional<double> driver_dimension;
  std::optional<double> lyapunov_reference;  ///< 1 / |most negative driver exponent|
  std::optional<double> lyapunov_lambda1;
  std::optional<double> dimension_bound;
  std::optional<double> contraction_mu;
  std::optional<double> g2_full_rank_fraction;
  std::optional<double> min_singular_value;
  std::optional<double> persistence_fraction;
  double wall_time_seconds = 0.0;
};

std::vector<std::string> result_header();
/// Rows in the given order; the wall-time column is last and can be left out.
void write_results(std::ostream& out, const ExperimentConfig& config,
                   const std::vector<ResultRow>& rows, bool include_wall_time = true);

/// Seed of reservoir `seed_index` for state dimension `state_dim`. The same
/// base matrices are rescaled across the target-norm grid.
std::uint64_t reservoir_seed(std::uint64_t master, int state_dim, int seed_index);
std::uint64_t block_seed(std::uint64_t master, int state_dim, int seed_index, int block);

Reservoir make_reservoir(const ExperimentConfig& config, int state_dim, double target_norm,
                         int seed_index);

/// Fixed points of every block plus their m - 1 iterates, stacked.
PointCloud<double> fixed_point_cloud(const Reservoir& params,
                                     const std::vector<InputWindow<double>>& blocks,
                                     double tolerance, int max_iterations, int threads = 1);

struct DriverRuns {
  OdeSystem system;
  std::vector<Trajectory> trajectories;  ///< one per initial condition that succeeded
  std::vector<std::string> failures;     ///< blowup diagnostics
};

DriverRuns integrate_drivers(const ExperimentConfig& config);
/// All trajectory samples, ordered by (initial, time).
PointCloud<double> driver_cloud(const std::vector<Trajectory>& trajectories);
/// Drives the reservoir from the origin with each observed trajectory and
/// pools the post-washout states.
PointCloud<double> reservoir_cloud(const Reservoir& params, const std::vector<Trajectory>& trajectories,
                                   const std::vector<int>& coordinates, double scale,
                                   double washout_fraction, int steps = 0);

/// Lyapunov spectrum of the ODE per unit time, along `steps` RK4 steps from `initial`.
SpectrumReport<double> driver_lyapunov(const OdeSystem& system, const Eigen::Vector3d& initial,
                                       double dt, Eigen::Index steps, int renorm_every = 1);

std::vector<ResultRow> run_lower_bound(const ExperimentConfig& config);
std::vector<ResultRow> run_upper_bound(const ExperimentConfig& config);
std::vector<ResultRow> run_rank_sweep(const ExperimentConfig& config);
std::vector<ResultRow> run_lyapunov(const ExperimentConfig& config);
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Runs f(0..n-1) on up to `threads` workers. Results must go to disjoint
/// slots; the first exception by index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };
/// From RCDIM_LOG (quiet|info|debug); defaults to quiet.
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

}  // namespace rcdim
