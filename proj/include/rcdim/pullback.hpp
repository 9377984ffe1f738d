#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rcdim/drivers.hpp"
#include "rcdim/errors.hpp"
#include "rcdim/reservoir.hpp"

namespace rcdim {

/// States x[0..n] of a driven run; column k holds x[k].
template <typename Scalar>
struct CocycleRun {
  MatrixX<Scalar> states;
  InputWindow<Scalar> inputs_used;
  VectorX<Scalar> initial_state;

  VectorX<Scalar> final_state() const { return states.col(states.cols() - 1); }
};

/// Finite sample of a pullback-attractor slice, one point per row.
/// `segment` and `time` are filled for trajectory-ordered clouds (washout
/// samples, driver trajectories) and left empty otherwise; the correlation
/// estimator uses them for temporal (Theiler) pair exclusion.
template <typename Scalar = double>
struct PointCloud {
  MatrixX<Scalar> points;
  std::string label;
  std::vector<std::int64_t> segment;
  std::vector<std::int64_t> time;

  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index dim() const noexcept { return points.cols(); }
  bool has_ordering() const noexcept { return !time.empty(); }

  /// Stacks `other` below this cloud, keeping ordering metadata consistent.
  void append(const PointCloud& other) {
    if (size() == 0) {
      *this = PointCloud{other.points, label.empty() ? other.label : label, other.segment,
                         other.time};
      return;
    }
    if (other.dim() != dim()) throw std::invalid_argument("PointCloud::append: dimension mismatch");
    if (has_ordering() != other.has_ordering())
      throw std::invalid_argument("PointCloud::append: mixing ordered and unordered clouds");
    MatrixX<Scalar> stacked(size() + other.size(), dim());
    stacked << points, other.points;
    points = std::move(stacked);
    segment.insert(segment.end(), other.segment.begin(), other.segment.end());
    time.insert(time.end(), other.time.begin(), other.time.end());
  }
};

template <typename Scalar>
struct FixedPointResult {
  VectorX<Scalar> point;
  Scalar residual;
  int iterations;
  InputWindow<Scalar> block;
};

/// Folds `step` over the window left to right: x[k] = g(u[k], x[k-1]).
template <typename Scalar>
CocycleRun<Scalar> cocycle(const ReservoirParams<Scalar>& params, const InputWindow<Scalar>& inputs,
                           const std::type_identity_t<VectorX<Scalar>>& initial) {
  if (initial.size() != params.state_dim())
    throw std::invalid_argument("cocycle: initial state has wrong length");
  if (inputs.length() > 0 && inputs.dim() != params.input_dim())
    throw std::invalid_argument("cocycle: input dimension does not match reservoir");
  CocycleRun<Scalar> run{MatrixX<Scalar>(params.state_dim(), inputs.length() + 1), inputs, initial};
  run.states.col(0) = initial;
  for (Eigen::Index k = 0; k < inputs.length(); ++k)
    run.states.col(k + 1) = step(params, inputs[k], run.states.col(k));
  return run;
}

/// Keeps the states with index > washout_fraction * n (1-based over x[1..n]).
template <typename Scalar>
PointCloud<Scalar> washout_sample(const ReservoirParams<Scalar>& params,
                                  const InputWindow<Scalar>& inputs, const std::type_identity_t<VectorX<Scalar>>& initial,
                                  double washout_fraction, std::int64_t segment_id = 0) {
  if (!(washout_fraction > 0.0 && washout_fraction < 1.0))
    throw std::invalid_argument("washout_sample: washout_fraction must lie in (0,1)");
  const Eigen::Index n = inputs.length();
  const auto cut = static_cast<Eigen::Index>(std::floor(washout_fraction * static_cast<double>(n) + 1e-9));
  if (n - cut < 2) {
    const auto min_len = static_cast<long long>(std::ceil(2.0 / (1.0 - washout_fraction)));
    std::ostringstream msg;
    msg << "washout_sample: input window too short (" << n << "); need at least about " << min_len
        << " steps to retain 2 states";
    throw std::invalid_argument(msg.str());
  }
  const auto run = cocycle(params, inputs, initial);
  PointCloud<Scalar> cloud;
  cloud.label = "washout";
  cloud.points = run.states.rightCols(n - cut).transpose();
  for (Eigen::Index k = cut + 1; k <= n; ++k) {
    cloud.segment.push_back(segment_id);
    cloud.time.push_back(k);
  }
  return cloud;
}

/// F(u, x) = g(u_1, g(u_2, ..., g(u_m, x))): the block is consumed right to
/// left, u_m first and u_1 last.
template <typename Scalar>
VectorX<Scalar> m_fold_map(const ReservoirParams<Scalar>& params, const InputWindow<Scalar>& block,
                           const std::type_identity_t<VectorX<Scalar>>& state) {
  if (!block.period) throw std::invalid_argument("m_fold_map: block has no period flag");
  VectorX<Scalar> y = state;
  for (Eigen::Index k = block.length() - 1; k >= 0; --k) y = step(params, block[k], y);
  return y;
}

/// Picard iteration from z = 0. Stops once ||z_{k+1} - z_k|| <= tol (1 - q) / q
/// with q = mu^m, which bounds the distance to the true fixed point by tol.
template <typename Scalar>
FixedPointResult<Scalar> solve_fixed_point(const ReservoirParams<Scalar>& params,
                                           const InputWindow<Scalar>& block, Scalar tolerance,
                                           int max_iterations) {
  if (!block.period) throw std::invalid_argument("solve_fixed_point: block has no period flag");
  if (!(tolerance > Scalar(0))) throw std::invalid_argument("solve_fixed_point: tolerance must be > 0");
  const auto report = contraction_report(params);
  if (!report.is_contraction) {
    std::ostringstream msg;
    msg << "solve_fixed_point: reservoir is not a contraction (mu = " << report.state_lipschitz
        << ")";
    throw PreconditionError(msg.str());
  }
  const Scalar q = std::pow(report.state_lipschitz, static_cast<Scalar>(block.length()));
  const Scalar threshold =
      q > Scalar(0) ? tolerance * (Scalar(1) - q) / q : std::numeric_limits<Scalar>::infinity();

  VectorX<Scalar> z = VectorX<Scalar>::Zero(params.state_dim());
  Scalar gap = std::numeric_limits<Scalar>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    VectorX<Scalar> next = m_fold_map(params, block, z);
    gap = (next - z).norm();
    z = std::move(next);
    if (gap <= threshold) {
      const Scalar residual = (m_fold_map(params, block, z) - z).norm();
      return {std::move(z), residual, it, block};
    }
  }
  std::ostringstream msg;
  msg << "solve_fixed_point: no convergence after " << max_iterations
      << " iterations (last step " << gap << ")";
  throw NonConvergenceError(static_cast<double>(gap), msg.str());
}

/// The m states z, g(u_m, z), g(u_{m-1}, g(u_m, z)), ..., g(u_2, ...): the
/// fixed point followed by its m - 1 iterates along the period.
template <typename Scalar>
PointCloud<Scalar> periodic_orbit(const ReservoirParams<Scalar>& params,
                                  const InputWindow<Scalar>& block,
                                  const FixedPointResult<Scalar>& fixed_point) {
  if (!block.period || block.vectors.rows() != fixed_point.block.vectors.rows() ||
      block.length() != fixed_point.block.length() ||
      block.vectors != fixed_point.block.vectors)
    throw std::invalid_argument("periodic_orbit: fixed point was solved for a different block");
  const Eigen::Index m = block.length();
  PointCloud<Scalar> cloud;
  cloud.label = "periodic-orbit";
  cloud.points.resize(m, params.state_dim());
  VectorX<Scalar> y = fixed_point.point;
  cloud.points.row(0) = y.transpose();
  for (Eigen::Index j = 1; j < m; ++j) {
    y = step(params, block[m - j], y);
    cloud.points.row(j) = y.transpose();
  }
  return cloud;
}

/// Lipschitz estimate for driving the same initial state with two windows.
/// Returns (||Phi(n,u,x) - Phi(n,v,x)||, eta * sum_i mu^i ||u[n-i] - v[n-i]||).
template <typename Scalar>
std::pair<Scalar, Scalar> lipschitz_bound_check(const ReservoirParams<Scalar>& params,
                                                const InputWindow<Scalar>& u,
                                                const InputWindow<Scalar>& v,
                                                const std::type_identity_t<VectorX<Scalar>>& initial) {
  if (u.length() != v.length() || u.dim() != v.dim())
    throw std::invalid_argument("lipschitz_bound_check: window shapes differ");
  const auto report = contraction_report(params);
  if (!report.is_contraction)
    throw PreconditionError("lipschitz_bound_check: reservoir is not a contraction");
  const Scalar lhs =
      (cocycle(params, u, initial).final_state() - cocycle(params, v, initial).final_state()).norm();
  Scalar rhs(0);
  Scalar weight(1);
  for (Eigen::Index i = 0; i < u.length(); ++i) {
    const Eigen::Index k = u.length() - 1 - i;
    rhs += weight * (u[k] - v[k]).norm();
    weight *= report.state_lipschitz;
  }
  return {lhs, report.input_lipschitz * rhs};
}

}  // namespace rcdim
