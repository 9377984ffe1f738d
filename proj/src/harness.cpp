#include "rcdim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rcdim/csv.hpp"
#include "rcdim/errors.hpp"
#include "rcdim/random.hpp"

namespace rcdim {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("RCDIM_LOG");
    if (!env) return LogLevel::Quiet;
    const std::string v(env);
    if (v == "debug" || v == "2") return LogLevel::Debug;
    if (v == "info" || v == "1") return LogLevel::Info;
    return LogLevel::Quiet;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  static std::mutex mutex;
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::lock_guard<std::mutex> lock(mutex);
  std::cerr << "[rcdim] " << message << '\n';
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t reservoir_seed(std::uint64_t master, int state_dim, int seed_index) {
  return Rng::stream(master, Stream::Reservoir,
                     {static_cast<std::uint64_t>(state_dim), static_cast<std::uint64_t>(seed_index)})
      .next_u64();
}

std::uint64_t block_seed(std::uint64_t master, int state_dim, int seed_index, int block) {
  return Rng::stream(master, Stream::Block,
                     {static_cast<std::uint64_t>(state_dim), static_cast<std::uint64_t>(seed_index),
                      static_cast<std::uint64_t>(block)})
      .next_u64();
}

namespace {

std::uint64_t estimator_seed(std::uint64_t master, std::size_t row) {
  return Rng::stream(master, Stream::Subsample, {static_cast<std::uint64_t>(row)}).next_u64();
}

int input_dim_for(const ExperimentConfig& c, const std::vector<int>& coordinates) {
  return c.driver.kind == DriverKind::Periodic ? c.driver.input_dim
                                               : static_cast<int>(coordinates.size());
}

std::string join_coordinates(const std::vector<int>& coordinates) {
  std::string s;
  for (std::size_t i = 0; i < coordinates.size(); ++i) s += (i ? " " : "") + std::to_string(coordinates[i]);
  return s;
}

Reservoir make_reservoir_with_inputs(const ExperimentConfig& config, int state_dim, int input_dim,
                                     double target_norm, int seed_index) {
  Reservoir r = generate_reservoir<double>(reservoir_seed(config.seed, state_dim, seed_index), state_dim,
                                           input_dim, target_norm, config.reservoir.leak_rate);
  if (!config.reservoir.zero_input_matrix) return r;
  return Reservoir(r.recurrent_matrix(), MatrixX<double>::Zero(state_dim, input_dim), r.leak_rate());
}

InputWindow<double> make_block(const ExperimentConfig& c, int state_dim, int seed_index, int b) {
  const auto& d = c.driver;
  if (d.zero_block) return InputWindow<double>(MatrixX<double>::Zero(d.input_dim, d.period), d.period);
  return random_periodic_block(block_seed(c.seed, state_dim, seed_index, b), d.period, d.input_dim,
                               d.input_low, d.input_high);
}

ResultRow base_row(const ExperimentConfig& c, int state_dim, int input_dim, double norm, int seed_index) {
  ResultRow row;
  row.experiment = c.experiment;
  row.master_seed = c.seed;
  row.seed_index = seed_index;
  row.reservoir_seed = reservoir_seed(c.seed, state_dim, seed_index);
  row.state_dim = state_dim;
  row.input_dim = input_dim;
  row.target_norm = norm;
  return row;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string failure(const std::exception& e) { return std::string("failed: ") + e.what(); }

OdeSystem ode_for(const DriverSpec& d) {
  const auto& p = d.ode_parameters;
  return d.kind == DriverKind::Rossler ? OdeSystem::rossler(p[0], p[1], p[2])
                                       : OdeSystem::lorenz(p[0], p[1], p[2]);
}

struct Cell {
  int state_dim;
  double norm;
  int seed_index;
  std::size_t coordinate_set;
};

std::vector<Cell> cells(const ExperimentConfig& c, std::size_t coordinate_sets) {
  std::vector<Cell> out;
  for (int n : c.reservoir.state_dims)
    for (double norm : c.reservoir.target_norms)
      for (int s = 0; s < c.reservoir.seeds; ++s)
        for (std::size_t k = 0; k < coordinate_sets; ++k) out.push_back({n, norm, s, k});
  return out;
}

}  // namespace

Reservoir make_reservoir(const ExperimentConfig& config, int state_dim, double target_norm, int seed_index) {
  return make_reservoir_with_inputs(config, state_dim, config.driver.input_dim, target_norm, seed_index);
}

PointCloud<double> fixed_point_cloud(const Reservoir& params, const std::vector<InputWindow<double>>& blocks,
                                     double tolerance, int max_iterations, int threads) {
  PointCloud<double> cloud;
  cloud.label = "periodic-orbits";
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.length();
  cloud.points.resize(total, params.state_dim());
  std::vector<Eigen::Index> offset(blocks.size() + 1, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) offset[b + 1] = offset[b] + blocks[b].length();
  parallel_for(blocks.size(), threads, [&](std::size_t b) {
    const auto fp = solve_fixed_point(params, blocks[b], tolerance, max_iterations);
    const auto orbit = periodic_orbit(params, blocks[b], fp);
    cloud.points.middleRows(offset[b], orbit.size()) = orbit.points;
  });
  return cloud;
}

DriverRuns integrate_drivers(const ExperimentConfig& config) {
  const auto& d = config.driver;
  if (d.kind != DriverKind::Lorenz && d.kind != DriverKind::Rossler)
    throw std::invalid_argument("integrate_drivers: driver is not an ODE");
  DriverRuns runs{ode_for(d), {}, {}};
  std::vector<std::optional<Trajectory>> traj(static_cast<std::size_t>(d.initial_count));
  std::vector<std::string> errors(traj.size());
  parallel_for(traj.size(), config.threads, [&](std::size_t i) {
    const auto x0 = perturbed_initial(runs.system, config.seed, i, d.initial_spread);
    try {
      traj[i] = rk4_integrate(runs.system, x0, config.run.dt, config.run.t_end, config.run.t_transient);
    } catch (const BlowupError& e) {
      errors[i] = "initial " + std::to_string(i) + ": " + e.what();
    }
  });
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj[i])
      runs.trajectories.push_back(std::move(*traj[i]));
    else
      runs.failures.push_back(errors[i]);
  }
  return runs;
}

PointCloud<double> driver_cloud(const std::vector<Trajectory>& trajectories) {
  PointCloud<double> cloud;
  cloud.label = "driver";
  Eigen::Index total = 0;
  for (const auto& t : trajectories) total += static_cast<Eigen::Index>(t.size());
  cloud.points.resize(total, 3);
  Eigen::Index row = 0;
  for (std::size_t s = 0; s < trajectories.size(); ++s)
    for (std::size_t k = 0; k < trajectories[s].size(); ++k) {
      cloud.points.row(row++) = trajectories[s].points[k].transpose();
      cloud.segment.push_back(static_cast<std::int64_t>(s));
      cloud.time.push_back(static_cast<std::int64_t>(k));
    }
  return cloud;
}

PointCloud<double> reservoir_cloud(const Reservoir& params, const std::vector<Trajectory>& trajectories,
                                   const std::vector<int>& coordinates, double scale,
                                   double washout_fraction, int steps) {
  PointCloud<double> cloud;
  for (std::size_t s = 0; s < trajectories.size(); ++s) {
    auto inputs = observe(trajectories[s], coordinates, scale);
    if (steps > 0 && steps < inputs.length()) inputs = inputs.slice(0, steps);
    const VectorX<double> origin = VectorX<double>::Zero(params.state_dim());
    cloud.append(washout_sample(params, inputs, origin, washout_fraction, static_cast<std::int64_t>(s)));
  }
  cloud.label = "reservoir";
  return cloud;
}

SpectrumReport<double> driver_lyapunov(const OdeSystem& system, const Eigen::Vector3d& initial, double dt,
                                       Eigen::Index steps, int renorm_every) {
  Eigen::Vector3d x = initial;
  auto report = qr_lyapunov<double>(3, steps, renorm_every, [&](Eigen::Index, MatrixX<double>& frame) {
    Eigen::Matrix3d tangent = Eigen::Matrix3d::Identity();
    x = rk4_variational_step(system, x, dt, tangent);
    frame = tangent * frame;
  });
  for (auto& l : report.exponents)
    if (l > kLogFloor) l /= dt;
  report.dimension_bound = dimension_bound(report.exponents);
  return report;
}

std::vector<ResultRow> run_lower_bound(const ExperimentConfig& config) {
  if (config.experiment != ExperimentKind::LowerBound)
    throw std::invalid_argument("run_lower_bound: config is not a lower-bound experiment");
  validate_config(config);
  const auto list = cells(config, 1);
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& cell = list[i];
    const auto start = std::chrono::steady_clock::now();
    ResultRow row = base_row(config, cell.state_dim, config.driver.input_dim, cell.norm, cell.seed_index);
    const Reservoir params = make_reservoir(config, cell.state_dim, cell.norm, cell.seed_index);
    const auto contraction = contraction_report(params);
    row.contraction_mu = contraction.state_lipschitz;
    if (!contraction.is_contraction) {
      std::ostringstream msg;
      msg << "lower-bound: G1 fails, ||W||_2 = " << csv::format_real(spectral_norm(params.recurrent_matrix()))
          << " gives mu = " << csv::format_real(contraction.state_lipschitz) << " >= 1";
      throw PreconditionError(msg.str());
    }
    std::vector<InputWindow<double>> blocks;
    blocks.reserve(static_cast<std::size_t>(config.driver.block_count));
    for (int b = 0; b < config.driver.block_count; ++b)
      blocks.push_back(make_block(config, cell.state_dim, cell.seed_index, b));
    log_message(LogLevel::Info, "lower-bound: N_r=" + std::to_string(cell.state_dim) + " solving " +
                                    std::to_string(blocks.size()) + " fixed points");
    try {
      const auto cloud = fixed_point_cloud(params, blocks, config.run.tolerance, config.run.max_iterations,
                                           config.threads);
      auto settings = config.dimension;
      settings.seed = estimator_seed(config.seed, i);
      settings.threads = config.threads;
      const auto est = estimate_dimension(cloud, settings);
      row.dimension_estimate = est.value;
      row.fit_residual = est.fit_residual;
      row.point_count = static_cast<double>(cloud.size());
    } catch (const NumericalError& e) {
      row.status = failure(e);
    }
    row.wall_time_seconds = seconds_since(start);
    log_message(LogLevel::Info, "lower-bound: N_r=" + std::to_string(cell.state_dim) + " estimate " +
                                    csv::format_optional(row.dimension_estimate));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_upper_bound(const ExperimentConfig& config) {
  if (config.experiment != ExperimentKind::UpperBound)
    throw std::invalid_argument("run_upper_bound: config is not an upper-bound experiment");
  validate_config(config);
  const auto& obs = config.observation;
  const bool zero = config.driver.kind == DriverKind::Zero;

  std::vector<Trajectory> trajectories;
  std::string driver_failure;
  std::optional<double> driver_dim, lyap_ref;
  if (zero) {
    // Constant zero input: the same sample grid as an ODE driver, all zeros.
    Trajectory t;
    t.dt = config.run.dt;
    const auto total = std::llround(config.run.t_end / config.run.dt);
    const auto first = std::llround(std::ceil(config.run.t_transient / config.run.dt - 1e-9));
    t.t_start = static_cast<double>(first) * t.dt;
    t.points.assign(static_cast<std::size_t>(std::max<long long>(0, total - first)), Eigen::Vector3d::Zero());
    trajectories.assign(static_cast<std::size_t>(config.driver.initial_count), t);
    driver_dim = 0.0;
  } else {
    auto runs = integrate_drivers(config);
    if (!runs.failures.empty()) {
      driver_failure = "failed: " + runs.failures.front();
      log_message(LogLevel::Info, "upper-bound: " + driver_failure);
    }
    trajectories = std::move(runs.trajectories);
    if (driver_failure.empty() && config.run.driver_reference) {
      try {
        auto settings = config.dimension;
        settings.seed = estimator_seed(config.seed, std::numeric_limits<std::uint32_t>::max());
        settings.threads = config.threads;
        driver_dim = estimate_dimension(driver_cloud(trajectories), settings).value;
        const auto& first = trajectories.front();
        const auto spectrum = driver_lyapunov(runs.system, first.points.front(), config.run.dt,
                                          static_cast<Eigen::Index>(first.size()), config.run.renorm_every);
        lyap_ref = 1.0 / std::abs(spectrum.exponents.back());
      } catch (const NumericalError& e) {
        log_message(LogLevel::Info, std::string("upper-bound: driver reference failed: ") + e.what());
      }
    }
  }

  const auto list = cells(config, obs.coordinate_sets.size());
  std::vector<ResultRow> rows(list.size());
  parallel_for(list.size(), config.threads, [&](std::size_t i) {
    const auto& cell = list[i];
    const auto& coords = obs.coordinate_sets[cell.coordinate_set];
    const auto start = std::chrono::steady_clock::now();
    ResultRow row = base_row(config, cell.state_dim, static_cast<int>(coords.size()), cell.norm, cell.seed_index);
    row.coordinates = join_coordinates(coords);
    row.driver_dimension = driver_dim;
    row.lyapunov_reference = lyap_ref;
    const Reservoir params = make_reservoir_with_inputs(config, cell.state_dim, static_cast<int>(coords.size()),
                                                        cell.norm, cell.seed_index);
    row.contraction_mu = contraction_report(params).state_lipschitz;
    if (!driver_failure.empty()) {
      row.status = driver_failure;
    } else {
      try {
        const auto cloud = reservoir_cloud(params, trajectories, coords, obs.scale, config.run.washout_fraction,
                                           config.run.steps);
        auto settings = config.dimension;
        settings.seed = estimator_seed(config.seed, i);
        const auto est = estimate_dimension(cloud, settings);
        row.dimension_estimate = est.value;
        row.fit_residual = est.fit_residual;
        row.point_count = static_cast<double>(cloud.size());
      } catch (const NumericalError& e) {
        row.status = failure(e);
      }
    }
    row.wall_time_seconds = seconds_since(start);
    log_message(LogLevel::Debug, "upper-bound: N_r=" + std::to_string(cell.state_dim) + " rho=" +
                                     csv::format_real(cell.norm) + " estimate " +
                                     csv::format_optional(row.dimension_estimate));
    rows[i] = std::move(row);
  });
  return rows;
}

std::vector<ResultRow> run_rank_sweep(const ExperimentConfig& config) {
  if (config.experiment != ExperimentKind::RankSweep)
    throw std::invalid_argument("run_rank_sweep: config is not a rank-sweep experiment");
  validate_config(config);
  const auto list = cells(config, 1);
  std::vector<ResultRow> rows(list.size());
  parallel_for(list.size(), config.threads, [&](std::size_t i) {
    const auto& cell = list[i];
    const auto start = std::chrono::steady_clock::now();
    ResultRow row = base_row(config, cell.state_dim, config.driver.input_dim, cell.norm, cell.seed_index);
    const Reservoir params = make_reservoir(config, cell.state_dim, cell.norm, cell.seed_index);
    row.contraction_mu = contraction_report(params).state_lipschitz;
    const auto block = make_block(config, cell.state_dim, cell.seed_index, 0);
    try {
      const auto rank = check_G2(params, block, config.run.rank_tolerance, config.run.tolerance,
                                 config.run.max_iterations);
      row.g2_full_rank_fraction = rank.full_rank ? 1.0 : 0.0;
      row.min_singular_value = rank.smallest_singular_value();
      if (config.run.persistence_trials > 0 && rank.full_rank) {
        const std::uint64_t seed = Rng::stream(config.seed, Stream::Perturbation,
                                               {static_cast<std::uint64_t>(cell.state_dim),
                                                static_cast<std::uint64_t>(cell.seed_index)})
                                       .next_u64();
        row.persistence_fraction =
            perturbation_persistence(params, block, config.run.persistence_radius, config.run.persistence_trials,
                                     seed, config.run.rank_tolerance)
                .fraction;
      }
    } catch (const PreconditionError& e) {
      row.status = std::string("failed: ") + e.what();
    } catch (const NumericalError& e) {
      row.status = failure(e);
    }
    row.wall_time_seconds = seconds_since(start);
    rows[i] = std::move(row);
  });
  return rows;
}

std::vector<ResultRow> run_lyapunov(const ExperimentConfig& config) {
  if (config.experiment != ExperimentKind::Lyapunov)
    throw std::invalid_argument("run_lyapunov: config is not a lyapunov experiment");
  validate_config(config);
  const bool periodic = config.driver.kind == DriverKind::Periodic;
  const bool ode = config.driver.kind == DriverKind::Lorenz || config.driver.kind == DriverKind::Rossler;
  const auto& obs = config.observation;

  std::vector<Trajectory> trajectories;
  std::string driver_failure;
  if (ode) {
    auto runs = integrate_drivers(config);
    if (!runs.failures.empty()) driver_failure = "failed: " + runs.failures.front();
    trajectories = std::move(runs.trajectories);
  }

  const auto list = cells(config, periodic ? 1 : obs.coordinate_sets.size());
  std::vector<ResultRow> rows(list.size());
  parallel_for(list.size(), config.threads, [&](std::size_t i) {
    const auto& cell = list[i];
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int>& coords = obs.coordinate_sets[cell.coordinate_set];
    const int input_dim = input_dim_for(config, coords);
    ResultRow row = base_row(config, cell.state_dim, input_dim, cell.norm, cell.seed_index);
    if (!periodic) row.coordinates = join_coordinates(coords);
    const Reservoir params = make_reservoir_with_inputs(config, cell.state_dim, input_dim, cell.norm, cell.seed_index);
    row.contraction_mu = contraction_report(params).state_lipschitz;

    InputWindow<double> inputs;
    if (periodic) {
      const auto block = make_block(config, cell.state_dim, cell.seed_index, 0);
      const Eigen::Index length = config.run.steps > 0 ? config.run.steps
                                                       : static_cast<Eigen::Index>(config.driver.period) *
                                                             config.driver.block_count;
      MatrixX<double> v(block.dim(), length);
      for (Eigen::Index k = 0; k < length; ++k) v.col(k) = block[k % block.length()];
      inputs = InputWindow<double>(std::move(v));
    } else if (ode) {
      if (!driver_failure.empty() || trajectories.empty()) {
        row.status = driver_failure.empty() ? "failed: no trajectories" : driver_failure;
        row.wall_time_seconds = seconds_since(start);
        rows[i] = std::move(row);
        return;
      }
      // Each reservoir seed follows its own initial condition.
      const auto& traj = trajectories[static_cast<std::size_t>(cell.seed_index) % trajectories.size()];
      inputs = observe(traj, coords, obs.scale);
      if (config.run.steps > 0 && config.run.steps < inputs.length()) inputs = inputs.slice(0, config.run.steps);
    } else {
      const Eigen::Index length = config.run.steps > 0
                                      ? config.run.steps
                                      : std::llround((config.run.t_end - config.run.t_transient) / config.run.dt);
      inputs = InputWindow<double>(MatrixX<double>::Zero(input_dim, length));
    }

    const Eigen::Index washout = std::min<Eigen::Index>(config.run.lyapunov_washout, inputs.length() - 1);
    VectorX<double> x = VectorX<double>::Zero(cell.state_dim);
    if (washout > 0) x = cocycle(params, inputs.slice(0, washout), x).final_state();
    const auto spectrum = conditional_lyapunov(params, inputs.slice(washout, inputs.length() - washout), x,
                                           config.run.renorm_every);
    row.lyapunov_lambda1 = spectrum.exponents.front();
    row.dimension_bound = spectrum.dimension_bound;
    row.point_count = static_cast<double>(spectrum.steps_used);
    row.wall_time_seconds = seconds_since(start);
    rows[i] = std::move(row);
  });
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::LowerBound: return run_lower_bound(config);
    case ExperimentKind::UpperBound: return run_upper_bound(config);
    case ExperimentKind::RankSweep: return run_rank_sweep(config);
    case ExperimentKind::Lyapunov: return run_lyapunov(config);
  }
  throw std::logic_error("unknown experiment kind");
}

std::vector<std::string> result_header() {
  return {"experiment",       "master_seed",        "seed_index",          "reservoir_seed",
          "state_dim",        "input_dim",          "target_norm",         "leak_rate",
          "zero_input_matrix", "driver",            "ode_p1",              "ode_p2",
          "ode_p3",           "initial_count",      "initial_spread",      "period",
          "block_count",      "zero_block",         "input_low",           "input_high",
          "coordinates",      "scale",              "dt",                  "t_end",
          "t_transient",      "washout_fraction",   "steps",               "tolerance",
          "max_iterations",   "renorm_every",       "lyapunov_washout",    "rank_tolerance",
          "method",           "radii",              "lower",               "lower_parameter",
          "range",            "standardize",        "theiler",             "max_points",
          "status",           "dimension_estimate", "fit_residual",        "point_count",
          "driver_dimension", "lyapunov_reference", "lyapunov_lambda1",    "dimension_bound",
          "contraction_mu",   "g2_full_rank_fraction", "min_singular_value", "persistence_fraction",
          "wall_time_seconds"};
}

void write_results(std::ostream& out, const ExperimentConfig& c, const std::vector<ResultRow>& rows,
                   bool include_wall_time) {
  using csv::format_optional;
  using csv::format_real;
  auto header = result_header();
  if (!include_wall_time) header.pop_back();
  out << csv::join(header) << '\n';
  const bool ode = c.driver.kind == DriverKind::Lorenz || c.driver.kind == DriverKind::Rossler;
  auto opt = [&](const std::string& v, bool on) { return on ? v : std::string(); };
  for (const auto& r : rows) {
    std::vector<std::string> f = {
        to_string(r.experiment),
        std::to_string(r.master_seed),
        std::to_string(r.seed_index),
        std::to_string(r.reservoir_seed),
        std::to_string(r.state_dim),
        std::to_string(r.input_dim),
        format_real(r.target_norm),
        format_real(c.reservoir.leak_rate),
        c.reservoir.zero_input_matrix ? "true" : "false",
        to_string(c.driver.kind),
        opt(format_real(c.driver.ode_parameters[0]), ode),
        opt(format_real(c.driver.ode_parameters[1]), ode),
        opt(format_real(c.driver.ode_parameters[2]), ode),
        std::to_string(c.driver.initial_count),
        format_real(c.driver.initial_spread),
        std::to_string(c.driver.period),
        std::to_string(c.driver.block_count),
        c.driver.zero_block ? "true" : "false",
        format_real(c.driver.input_low),
        format_real(c.driver.input_high),
        r.coordinates,
        format_real(c.observation.scale),
        format_real(c.run.dt),
        format_real(c.run.t_end),
        format_real(c.run.t_transient),
        format_real(c.run.washout_fraction),
        std::to_string(c.run.steps),
        format_real(c.run.tolerance),
        std::to_string(c.run.max_iterations),
        std::to_string(c.run.renorm_every),
        std::to_string(c.run.lyapunov_washout),
        format_real(c.run.rank_tolerance),
        to_string(c.dimension.method),
        std::to_string(c.dimension.radii_count),
        to_string(c.dimension.lower_rule),
        format_real(c.dimension.lower_parameter),
        to_string(c.dimension.range),
        to_string(c.dimension.standardize),
        std::to_string(c.dimension.theiler_window),
        std::to_string(c.dimension.max_points),
        r.status,
        format_optional(r.dimension_estimate),
        format_optional(r.fit_residual),
        format_optional(r.point_count),
        format_optional(r.driver_dimension),
        format_optional(r.lyapunov_reference),
        format_optional(r.lyapunov_lambda1),
        format_optional(r.dimension_bound),
        format_optional(r.contraction_mu),
        format_optional(r.g2_full_rank_fraction),
        format_optional(r.min_singular_value),
        format_optional(r.persistence_fraction),
    };
    if (include_wall_time) f.push_back(format_real(r.wall_time_seconds));
    out << csv::join(f) << '\n';
  }
}

}  // namespace rcdim
