#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcdim/reservoir.hpp"

namespace rcdim {

enum class OdeKind { Lorenz, Rossler };

/// Lorenz (sigma, rho, beta) or Rossler (a, b, c); defaults are the classical
/// chaotic parameter sets.
struct OdeSystem {
  OdeKind kind = OdeKind::Lorenz;
  std::array<double, 3> parameters{10.0, 28.0, 8.0 / 3.0};

  static OdeSystem lorenz(double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0) {
    return {OdeKind::Lorenz, {sigma, rho, beta}};
  }
  static OdeSystem rossler(double a = 0.2, double b = 0.2, double c = 5.7) {
    return {OdeKind::Rossler, {a, b, c}};
  }

  Eigen::Vector3d rhs(const Eigen::Vector3d& u) const;
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& u) const;
  /// Documented base point near the attractor; both systems use (1, 1, 1).
  Eigen::Vector3d base_point() const { return Eigen::Vector3d::Ones(); }

  bool operator==(const OdeSystem&) const = default;
};

std::string to_string(OdeKind kind);
OdeKind parse_ode_kind(const std::string& name);

/// Uniformly spaced samples u(t_start), u(t_start + dt), ...
struct Trajectory {
  std::vector<Eigen::Vector3d> points;
  double dt = 0.0;
  double t_start = 0.0;

  std::size_t size() const noexcept { return points.size(); }
};

/// Ordered input vectors, stored one per column (column k is u[k+1]). When
/// `period` is set the window is one period of a periodic input sequence.
template <typename Scalar = double>
struct InputWindow {
  MatrixX<Scalar> vectors;
  std::optional<Eigen::Index> period;

  InputWindow() = default;
  explicit InputWindow(MatrixX<Scalar> v, std::optional<Eigen::Index> m = std::nullopt)
      : vectors(std::move(v)), period(m) {
    if (period && *period != vectors.cols())
      throw std::invalid_argument("period flag must equal window length");
  }

  Eigen::Index length() const noexcept { return vectors.cols(); }
  Eigen::Index dim() const noexcept { return vectors.rows(); }
  auto operator[](Eigen::Index k) const { return vectors.col(k); }

  /// Sub-window [first, first + count); drops the period flag.
  InputWindow slice(Eigen::Index first, Eigen::Index count) const {
    return InputWindow(vectors.middleCols(first, count));
  }

  bool operator==(const InputWindow&) const = default;
};

/// Classical fixed-step RK4 from t = 0 to t_end; samples with t < t_transient
/// are dropped. Throws BlowupError once any component exceeds 1e6.
Trajectory rk4_integrate(const OdeSystem& system, const Eigen::Vector3d& initial, double dt,
                         double t_end, double t_transient);

/// One RK4 step of the state together with its tangent map (the RK4 step
/// applied to the variational equation). Returns the propagated state.
Eigen::Vector3d rk4_variational_step(const OdeSystem& system, const Eigen::Vector3d& state,
                                     double dt, Eigen::Matrix3d& tangent);

/// Seeded initial condition: base point plus uniform [-0.5, 0.5]^3.
Eigen::Vector3d perturbed_initial(const OdeSystem& system, std::uint64_t master_seed,
                                  std::uint64_t index, double spread = 0.5);

InputWindow<double> observe(const Trajectory& trajectory, std::span<const int> coordinates,
                            double scale);

/// m vectors with i.i.d. uniform [lo, hi] entries; period flag = m.
InputWindow<double> random_periodic_block(std::uint64_t seed, Eigen::Index period,
                                          Eigen::Index input_dim, double lo = 0.0,
                                          double hi = 1.0);

/// Truncated weighted sequence metric: max_i decay^{-|i - center|} ||a[i] - b[i]||_2.
template <typename Scalar>
Scalar weighted_distance(const InputWindow<Scalar>& a, const InputWindow<Scalar>& b,
                         Scalar decay, Eigen::Index center) {
  if (a.length() != b.length() || a.dim() != b.dim())
    throw std::invalid_argument("weighted_distance: window shapes differ");
  if (!(decay > Scalar(1))) throw std::invalid_argument("weighted_distance: decay must be > 1");
  if (center < 0 || center >= a.length())
    throw std::invalid_argument("weighted_distance: center outside window");
  Scalar best(0);
  for (Eigen::Index i = 0; i < a.length(); ++i) {
    const auto lag = static_cast<Scalar>(i > center ? i - center : center - i);
    const Scalar term = std::pow(decay, -lag) * (a[i] - b[i]).norm();
    best = std::max(best, term);
  }
  return best;
}

}  // namespace rcdim
