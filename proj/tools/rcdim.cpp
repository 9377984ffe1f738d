// rcdim: run reservoir dimension experiments from a config file.
//
//   rcdim lower-bound --config lb.conf --out lb.csv
//   rcdim upper-bound --seed 7 --threads 4
//   rcdim dimension cloud.csv --method box
//
// Exit codes: 0 success, 1 config/usage error, 2 numerical failure.
// Set RCDIM_LOG=info|debug for progress on stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "rcdim/config.hpp"
#include "rcdim/csv.hpp"
#include "rcdim/errors.hpp"
#include "rcdim/harness.hpp"

namespace {

struct ExperimentArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  bool print_config = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (defaults for the experiment when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
  cmd->add_option("--out", args.out, "output CSV (overrides output.path)");
  cmd->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--print-config", args.print_config, "print the fully resolved config and exit");
}

int run_experiment_command(rcdim::ExperimentKind kind, const ExperimentArgs& args) {
  using namespace rcdim;
  ExperimentConfig cfg;
  try {
    cfg = args.config_path.empty() ? default_config(kind) : load_config(args.config_path);
    if (cfg.experiment != kind)
      throw ConfigError(0, "experiment.kind",
                        "config is for '" + to_string(cfg.experiment) + "', not '" + to_string(kind) + "'");
    if (args.seed) cfg.seed = *args.seed;
    if (args.threads) cfg.threads = *args.threads;
    if (!args.out.empty()) cfg.output_path = args.out;
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (args.print_config) {
    std::cout << emit_config(cfg);
    return 0;
  }

  std::vector<ResultRow> rows;
  try {
    rows = run_experiment(cfg);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << cfg.output_path << '\n';
    return 1;
  }
  write_results(out, cfg, rows);

  std::size_t failed = 0, full_rank = 0;
  double min_sigma = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (r.status != "ok") ++failed;
    if (r.g2_full_rank_fraction && *r.g2_full_rank_fraction == 1.0) ++full_rank;
    if (r.min_singular_value) min_sigma = std::min(min_sigma, *r.min_singular_value);
  }
  std::cout << rows.size() << " rows written to " << cfg.output_path;
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  if (kind == ExperimentKind::RankSweep && !rows.empty())
    std::cout << "full-rank fraction " << csv::format_real(static_cast<double>(full_rank) / rows.size())
              << ", min sigma " << csv::format_real(min_sigma) << '\n';
  if (kind == ExperimentKind::LowerBound)
    for (const auto& r : rows)
      std::cout << "N_r=" << r.state_dim << " estimate " << csv::format_optional(r.dimension_estimate) << '\n';
  return failed == rows.size() && !rows.empty() ? 2 : 0;
}

struct DimensionArgs {
  std::string input;
  std::string method = "correlation";
  std::string range = "auto";
  int radii = 24;
  bool whiten = false;
  std::string curve_out;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run_dimension_command(const DimensionArgs& args) {
  using namespace rcdim;
  EstimatorSettings s;
  PointCloud<double> cloud;
  try {
    s.method = parse_dimension_method(args.method);
    s.range = parse_fit_range(args.range);
    s.radii_count = args.radii;
    s.standardize = args.whiten ? Standardize::Whiten : Standardize::None;
    s.seed = args.seed;
    s.threads = args.threads;
    std::ifstream in(args.input);
    if (!in) throw std::invalid_argument("cannot open " + args.input);
    cloud = csv::read_point_cloud(in);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  }
  try {
    ScalingCurve curve;
    const auto est = estimate_dimension(cloud, s, &curve);
    if (!args.curve_out.empty()) {
      std::ofstream out(args.curve_out, std::ios::binary);
      csv::write_scaling_curve(out, curve);
    }
    std::cout << "points " << cloud.size() << "\nambient " << cloud.dim() << "\nmethod "
              << to_string(est.method) << "\nestimate " << csv::format_real(est.value) << "\nfit_range "
              << est.fit_range.first << ' ' << est.fit_range.second << "\nfit_residual "
              << csv::format_real(est.fit_residual) << '\n';
    if (est.exceeds_ambient) std::cout << "warning: estimate exceeds the ambient dimension\n";
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension experiments for echo state network pullback attractors"};
  app.require_subcommand(1);

  ExperimentArgs lower, upper, rank, lyap;
  add_experiment_flags(app.add_subcommand("lower-bound", "fixed-point clouds of periodic inputs"), lower);
  add_experiment_flags(app.add_subcommand("upper-bound", "reservoir clouds driven by an ODE"), upper);
  add_experiment_flags(app.add_subcommand("rank-sweep", "surjectivity check over random seeds"), rank);
  add_experiment_flags(app.add_subcommand("lyapunov", "conditional Lyapunov exponents"), lyap);

  DimensionArgs dim;
  auto* dcmd = app.add_subcommand("dimension", "estimate the dimension of a point-cloud CSV");
  dcmd->add_option("input", dim.input, "CSV with header 'dim=N,label=...'")->required();
  dcmd->add_option("--method", dim.method, "correlation|box");
  dcmd->add_option("--range", dim.range, "auto|small-scale|manual(lo,hi)");
  dcmd->add_option("--radii", dim.radii, "number of radii");
  dcmd->add_flag("--whiten", dim.whiten, "whiten the cloud first");
  dcmd->add_option("--curve", dim.curve_out, "write the scaling curve here");
  dcmd->add_option("--seed", dim.seed, "subsampling seed");
  dcmd->add_option("--threads", dim.threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  using rcdim::ExperimentKind;
  if (app.got_subcommand("lower-bound")) return run_experiment_command(ExperimentKind::LowerBound, lower);
  if (app.got_subcommand("upper-bound")) return run_experiment_command(ExperimentKind::UpperBound, upper);
  if (app.got_subcommand("rank-sweep")) return run_experiment_command(ExperimentKind::RankSweep, rank);
  if (app.got_subcommand("lyapunov")) return run_experiment_command(ExperimentKind::Lyapunov, lyap);
  return run_dimension_command(dim);
}
