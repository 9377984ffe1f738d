#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "rcdim/drivers.hpp"
#include "rcdim/errors.hpp"
#include "rcdim/pullback.hpp"
#include "rcdim/random.hpp"
#include "rcdim/reservoir.hpp"

namespace rcdim {

/// Exponents that hit an exactly singular Jacobian are reported at this cap
/// (about log of the smallest positive double) and flagged.
inline constexpr double kLogFloor = -745.0;

/// SVD rank decision. The singular values are always kept so that the
/// threshold choice stays auditable.
template <typename Scalar = double>
struct RankReport {
  Eigen::Index matrix_rows = 0;
  Eigen::Index matrix_cols = 0;
  std::vector<Scalar> singular_values;
  Eigen::Index numerical_rank = 0;
  Scalar tolerance_used = 0;
  bool full_rank = false;

  Scalar smallest_singular_value() const {
    return singular_values.empty() ? Scalar(0) : singular_values.back();
  }
};

template <typename Scalar = double>
struct SpectrumReport {
  std::vector<Scalar> exponents;  ///< descending, per step, natural log
  std::vector<bool> capped;       ///< aligned with `exponents`
  Eigen::Index steps_used = 0;
  Scalar dimension_bound = 0;
};

struct G1Report {
  bool holds = false;
  double analytic_bound = 0.0;
  double sampled_max = 0.0;
};

struct PersistenceReport {
  double fraction = 1.0;  ///< retained / tested
  int retained = 0;
  int tested = 0;
  int skipped = 0;  ///< perturbations with ||W||_2 >= 1
};

/// D_2 g(u, x) = (1 - a) I + a diag(sech^2(W x + W_in u)) W.
template <typename Scalar, typename InputDerived, typename StateDerived>
MatrixX<Scalar> d2_g(const ReservoirParams<Scalar>& params, const Eigen::MatrixBase<InputDerived>& input,
                     const Eigen::MatrixBase<StateDerived>& state) {
  if (input.size() != params.input_dim() || state.size() != params.state_dim())
    throw std::invalid_argument("d2_g: input/state length does not match reservoir dims");
  const Scalar a = params.leak_rate();
  const VectorX<Scalar> pre = params.recurrent_matrix() * state + params.input_matrix() * input;
  const VectorX<Scalar> sech2 = (Scalar(1) - pre.array().tanh().square()).matrix();
  MatrixX<Scalar> j = a * (sech2.asDiagonal() * params.recurrent_matrix());
  j.diagonal().array() += Scalar(1) - a;
  return j;
}

/// Jacobian of the m-fold map with respect to the stacked block
/// (u_1, ..., u_m). Column block k is S_k W_in with
/// S_1 = D_1 and S_k = S_{k-1} W D_k, where D_k = diag(sech^2(W y_k + W_in u_k))
/// and y_m = state, y_{k-1} = g(u_k, y_k).
template <typename Scalar>
MatrixX<Scalar> d1_F_blocks(const ReservoirParams<Scalar>& params, const InputWindow<Scalar>& block,
                            const std::type_identity_t<VectorX<Scalar>>& state) {
  if (params.leak_rate() != Scalar(1))
    throw UnsupportedConfiguration("d1_F_blocks: only defined for leak_rate = 1");
  if (block.dim() != params.input_dim() || state.size() != params.state_dim())
    throw std::invalid_argument("d1_F_blocks: block/state shape does not match reservoir");
  const Eigen::Index m = block.length();
  const Eigen::Index n = params.state_dim();
  const Eigen::Index k_in = params.input_dim();
  const auto& w = params.recurrent_matrix();
  const auto& w_in = params.input_matrix();

  // sech^2 of the pre-activation at each step, indexed by block position.
  std::vector<VectorX<Scalar>> sech2(static_cast<std::size_t>(m));
  VectorX<Scalar> y = state;
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    const VectorX<Scalar> pre = w * y + w_in * block[k];
    const VectorX<Scalar> t = pre.array().tanh().matrix();
    sech2[static_cast<std::size_t>(k)] = (Scalar(1) - t.array().square()).matrix();
    y = t;
  }

  MatrixX<Scalar> out(n, m * k_in);
  MatrixX<Scalar> s = sech2[0].asDiagonal();
  for (Eigen::Index k = 0; k < m; ++k) {
    if (k > 0) s = (s * w) * sech2[static_cast<std::size_t>(k)].asDiagonal();
    out.middleCols(k * k_in, k_in) = s * w_in;
  }
  return out;
}

/// Columns (DW)^{k-1} D C for k = 1..N_r. With D = I this is the Kalman
/// controllability matrix [C | WC | ... | W^{N_r-1} C].
template <typename Scalar, typename DiagDerived, typename WDerived, typename CDerived>
MatrixX<Scalar> kalman_type_matrix(const Eigen::MatrixBase<DiagDerived>& d,
                                   const Eigen::MatrixBase<WDerived>& w,
                                   const Eigen::MatrixBase<CDerived>& column) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n || d.size() != n || column.size() != n)
    throw std::invalid_argument("kalman_type_matrix: shapes must agree");
  const MatrixX<Scalar> dw = d.asDiagonal() * w;
  MatrixX<Scalar> out(n, n);
  VectorX<Scalar> col = d.asDiagonal() * column;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.col(k) = col;
    col = dw * col;
  }
  return out;
}

/// Rank with threshold relative_tolerance * sigma_max * max(rows, cols).
template <typename Derived>
RankReport<typename Derived::Scalar> numerical_rank(const Eigen::MatrixBase<Derived>& m,
                                                    typename Derived::Scalar relative_tolerance = 1e-10) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) throw std::invalid_argument("numerical_rank: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("numerical_rank: non-finite entries");
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.eval());
  const auto& sv = svd.singularValues();
  RankReport<Scalar> r;
  r.matrix_rows = m.rows();
  r.matrix_cols = m.cols();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  r.tolerance_used = relative_tolerance * sv(0) * static_cast<Scalar>(std::max(m.rows(), m.cols()));
  r.numerical_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > r.tolerance_used) ++r.numerical_rank;
  r.full_rank = r.numerical_rank == std::min(m.rows(), m.cols());
  return r;
}

/// Analytic bound (1 - a) + a ||W||_2 on ||D_2 g||_2, plus the largest
/// sampled norm over u uniform in [input_lo, input_hi]^{N_in}, x in [-1,1]^{N_r}.
template <typename Scalar>
G1Report check_G1(const ReservoirParams<Scalar>& params, int samples, std::uint64_t seed,
                  double input_lo = 0.0, double input_hi = 1.0) {
  if (samples < 1) throw std::invalid_argument("check_G1: samples must be >= 1");
  G1Report out;
  out.analytic_bound = static_cast<double>(contraction_report(params).state_lipschitz);
  Rng rng = Rng::stream(seed, Stream::JacobianSamples);
  for (int s = 0; s < samples; ++s) {
    const MatrixX<Scalar> u = rng.uniform_matrix<Scalar>(params.input_dim(), 1, input_lo, input_hi);
    const MatrixX<Scalar> x = rng.uniform_matrix<Scalar>(params.state_dim(), 1, -1.0, 1.0);
    out.sampled_max = std::max(out.sampled_max, static_cast<double>(spectral_norm(d2_g(params, u, x))));
  }
  out.holds = out.analytic_bound < 1.0;
  return out;
}

/// Certifies the surjectivity condition for one block: solves the fixed point
/// z of the block and returns the rank report of D_1 F(block, z).
template <typename Scalar>
RankReport<Scalar> check_G2(const ReservoirParams<Scalar>& params, const InputWindow<Scalar>& block,
                            Scalar relative_tolerance = 1e-10, Scalar fixed_point_tolerance = 1e-12,
                            int max_iterations = 100000) {
  if (block.length() * params.input_dim() < params.state_dim())
    throw std::invalid_argument("check_G2: requires m * N_in >= N_r");
  if (!contraction_report(params).is_contraction)
    throw PreconditionError("check_G2: G1 does not hold (||W||_2 bound >= 1)");
  const auto fp = solve_fixed_point(params, block, fixed_point_tolerance, max_iterations);
  return numerical_rank(d1_F_blocks(params, block, fp.point), relative_tolerance);
}

/// Fraction of seeded perturbations W + dW, W_in + dW_in (entries uniform in
/// [-radius, radius]) for which the block still certifies full rank.
template <typename Scalar>
PersistenceReport perturbation_persistence(const ReservoirParams<Scalar>& params,
                                           const InputWindow<Scalar>& block, Scalar radius,
                                           int trials, std::uint64_t seed,
                                           Scalar relative_tolerance = 1e-10) {
  if (radius < Scalar(0)) throw std::invalid_argument("perturbation_persistence: radius must be >= 0");
  if (trials < 1) throw std::invalid_argument("perturbation_persistence: trials must be >= 1");
  if (!check_G2(params, block, relative_tolerance).full_rank)
    throw PreconditionError("perturbation_persistence: base point is not full rank");
  PersistenceReport out;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, Stream::Perturbation, {static_cast<std::uint64_t>(t)});
    MatrixX<Scalar> w = params.recurrent_matrix() +
                        rng.uniform_matrix<Scalar>(params.state_dim(), params.state_dim(),
                                                   -static_cast<double>(radius), static_cast<double>(radius));
    MatrixX<Scalar> w_in = params.input_matrix() +
                           rng.uniform_matrix<Scalar>(params.state_dim(), params.input_dim(),
                                                      -static_cast<double>(radius), static_cast<double>(radius));
    if (spectral_norm(w) >= Scalar(1)) {
      ++out.skipped;
      continue;
    }
    ReservoirParams<Scalar> perturbed(std::move(w), std::move(w_in), params.leak_rate());
    ++out.tested;
    if (check_G2(perturbed, block, relative_tolerance).full_rank) ++out.retained;
  }
  out.fraction = out.tested > 0 ? static_cast<double>(out.retained) / out.tested : 0.0;
  return out;
}

/// Kaplan-Yorke style bound from exponents sorted in descending order:
/// smallest m with sum_{j<=m+1} l_j < 0, then m + sum_{j<=m} l_j / -l_{m+1}.
/// Zero when l_1 < 0; saturates at the dimension when the full sum is >= 0.
template <typename Scalar>
Scalar dimension_bound(const std::vector<Scalar>& exponents) {
  const auto n = exponents.size();
  Scalar partial(0);
  for (std::size_t m = 0; m < n; ++m) {
    if (partial + exponents[m] < Scalar(0)) {
      if (m == 0) return Scalar(0);
      const Scalar bound = static_cast<Scalar>(m) + partial / (-exponents[m]);
      return std::clamp(bound, Scalar(0), static_cast<Scalar>(n));
    }
    partial += exponents[m];
  }
  return static_cast<Scalar>(n);
}

/// Lyapunov spectrum by QR re-orthonormalisation. `tangent_step(k, frame)`
/// must map the current frame through the k-th Jacobian in place. Exponents
/// are per step (divide by dt for continuous-time rates).
template <typename Scalar>
SpectrumReport<Scalar> qr_lyapunov(Eigen::Index dim, Eigen::Index steps, int renorm_every,
                                   const std::function<void(Eigen::Index, MatrixX<Scalar>&)>& tangent_step) {
  if (steps < 1) throw std::invalid_argument("qr_lyapunov: need at least one step");
  if (renorm_every < 1) throw std::invalid_argument("qr_lyapunov: renorm_every must be >= 1");
  MatrixX<Scalar> frame = MatrixX<Scalar>::Identity(dim, dim);
  std::vector<Scalar> sums(static_cast<std::size_t>(dim), Scalar(0));
  std::vector<bool> degenerate(static_cast<std::size_t>(dim), false);
  for (Eigen::Index k = 0; k < steps; ++k) {
    tangent_step(k, frame);
    if ((k + 1) % renorm_every == 0 || k + 1 == steps) {
      Eigen::HouseholderQR<MatrixX<Scalar>> qr(frame);
      const MatrixX<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
      MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(dim, dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        const Scalar rjj = std::abs(r(j, j));
        // Keep the frame oriented so that the R diagonal is nonnegative.
        if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
        if (rjj > Scalar(0) && std::log(rjj) > static_cast<Scalar>(kLogFloor))
          sums[static_cast<std::size_t>(j)] += std::log(rjj);
        else
          degenerate[static_cast<std::size_t>(j)] = true;
      }
      frame = std::move(q);
    }
  }
  SpectrumReport<Scalar> out;
  out.steps_used = steps;
  std::vector<std::pair<Scalar, bool>> ex;
  for (std::size_t j = 0; j < sums.size(); ++j) {
    const Scalar v = degenerate[j] ? static_cast<Scalar>(kLogFloor)
                                   : std::max(sums[j] / static_cast<Scalar>(steps), static_cast<Scalar>(kLogFloor));
    ex.emplace_back(v, degenerate[j]);
  }
  std::stable_sort(ex.begin(), ex.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [v, c] : ex) {
    out.exponents.push_back(v);
    out.capped.push_back(c);
  }
  out.dimension_bound = dimension_bound(out.exponents);
  return out;
}

/// Conditional Lyapunov exponents of the reservoir driven by `inputs` from
/// `initial`: the frame is pushed through D_2 g along the driven trajectory.
template <typename Scalar>
SpectrumReport<Scalar> conditional_lyapunov(const ReservoirParams<Scalar>& params,
                                            const InputWindow<Scalar>& inputs,
                                            const std::type_identity_t<VectorX<Scalar>>& initial, int renorm_every = 1) {
  if (inputs.length() == 0) throw std::invalid_argument("conditional_lyapunov: empty input window");
  if (inputs.dim() != params.input_dim() || initial.size() != params.state_dim())
    throw std::invalid_argument("conditional_lyapunov: shape mismatch");
  VectorX<Scalar> x = initial;
  return qr_lyapunov<Scalar>(params.state_dim(), inputs.length(), renorm_every,
                             [&](Eigen::Index k, MatrixX<Scalar>& frame) {
                               frame = d2_g(params, inputs[k], x) * frame;
                               x = step(params, inputs[k], x);
                             });
}

}  // namespace rcdim
