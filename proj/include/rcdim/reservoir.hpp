#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rcdim/random.hpp"

namespace rcdim {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Largest singular value, from a full SVD.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

/// Tanh echo state network x' = (1 - a) x + a tanh(W x + W_in u).
template <typename Scalar>
class ReservoirParams {
 public:
  ReservoirParams(MatrixX<Scalar> recurrent, MatrixX<Scalar> input, Scalar leak_rate)
      : recurrent_(std::move(recurrent)), input_(std::move(input)), leak_rate_(leak_rate) {
    if (recurrent_.rows() < 1 || recurrent_.rows() != recurrent_.cols())
      throw std::invalid_argument("recurrent matrix must be square and nonempty");
    if (input_.rows() != recurrent_.rows() || input_.cols() < 1)
      throw std::invalid_argument("input matrix must be state_dim x input_dim with input_dim >= 1");
    if (!(leak_rate_ > Scalar(0) && leak_rate_ <= Scalar(1)))
      throw std::invalid_argument("leak_rate must lie in (0,1]");
    if (!recurrent_.allFinite() || !input_.allFinite())
      throw std::invalid_argument("weight matrices must be finite");
  }

  const MatrixX<Scalar>& recurrent_matrix() const noexcept { return recurrent_; }
  const MatrixX<Scalar>& input_matrix() const noexcept { return input_; }
  Scalar leak_rate() const noexcept { return leak_rate_; }
  Eigen::Index state_dim() const noexcept { return recurrent_.rows(); }
  Eigen::Index input_dim() const noexcept { return input_.cols(); }

  bool operator==(const ReservoirParams&) const = default;

 private:
  MatrixX<Scalar> recurrent_;
  MatrixX<Scalar> input_;
  Scalar leak_rate_;
};

using Reservoir = ReservoirParams<double>;

/// Lipschitz constants of the step map: mu in the state, eta in the input.
template <typename Scalar>
struct ContractionReport {
  Scalar state_lipschitz;
  Scalar input_lipschitz;
  bool is_contraction;
};

/// Entries of W and W_in are i.i.d. uniform on [-1, 1] (W drawn first, row
/// major, then W_in); W is then rescaled so that ||W||_2 = target_norm.
template <typename Scalar = double>
ReservoirParams<Scalar> generate_reservoir(std::uint64_t seed, Eigen::Index state_dim,
                                           Eigen::Index input_dim, Scalar target_norm,
                                           Scalar leak_rate = Scalar(1)) {
  if (state_dim < 1 || input_dim < 1)
    throw std::invalid_argument("reservoir dimensions must be >= 1");
  if (!(target_norm > Scalar(0))) throw std::invalid_argument("target_norm must be > 0");
  Rng rng(seed);
  MatrixX<Scalar> w = rng.uniform_matrix<Scalar>(state_dim, state_dim, -1.0, 1.0);
  MatrixX<Scalar> w_in = rng.uniform_matrix<Scalar>(state_dim, input_dim, -1.0, 1.0);
  const Scalar norm = spectral_norm(w);
  if (!(norm > Scalar(0))) throw std::invalid_argument("sampled recurrent matrix is zero");
  w *= target_norm / norm;
  return ReservoirParams<Scalar>(std::move(w), std::move(w_in), leak_rate);
}

template <typename Scalar, typename InputDerived, typename StateDerived>
VectorX<Scalar> step(const ReservoirParams<Scalar>& params,
                     const Eigen::MatrixBase<InputDerived>& input,
                     const Eigen::MatrixBase<StateDerived>& state) {
  if (input.size() != params.input_dim() || state.size() != params.state_dim())
    throw std::invalid_argument("step: input/state length does not match reservoir dims");
  const Scalar a = params.leak_rate();
  VectorX<Scalar> pre = params.recurrent_matrix() * state + params.input_matrix() * input;
  if (a == Scalar(1)) return pre.array().tanh().matrix();
  return ((Scalar(1) - a) * state.array() + a * pre.array().tanh()).matrix();
}

/// Bounds from |tanh'| <= 1: mu = (1-a) + a ||W||_2, eta = a ||W_in||_2.
template <typename Scalar>
ContractionReport<Scalar> contraction_report(const ReservoirParams<Scalar>& params) {
  const Scalar a = params.leak_rate();
  const Scalar mu = (Scalar(1) - a) + a * spectral_norm(params.recurrent_matrix());
  const Scalar eta = a * spectral_norm(params.input_matrix());
  return {mu, eta, mu < Scalar(1)};
}

}  // namespace rcdim
