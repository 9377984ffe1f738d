#include <doctest.h>

#include <cmath>

#include "rcdim/jacobian.hpp"

using namespace rcdim;

namespace {

// Rank by Gaussian elimination with complete pivoting.
int elimination_rank(Eigen::MatrixXd a, double tol) {
  int rank = 0;
  const Eigen::Index rows = a.rows(), cols = a.cols();
  for (Eigen::Index k = 0; k < std::min(rows, cols); ++k) {
    Eigen::Index pr = k, pc = k;
    double best = 0.0;
    for (Eigen::Index i = k; i < rows; ++i)
      for (Eigen::Index j = k; j < cols; ++j)
        if (std::abs(a(i, j)) > best) best = std::abs(a(i, j)), pr = i, pc = j;
    if (best <= tol) break;
    a.row(k).swap(a.row(pr));
    a.col(k).swap(a.col(pc));
    for (Eigen::Index i = k + 1; i < rows; ++i) a.row(i) -= (a(i, k) / a(k, k)) * a.row(k);
    ++rank;
  }
  return rank;
}

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const double u1 = 1.0 - rng.unit(), u2 = rng.unit();
      m(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
  return m;
}

Eigen::MatrixXd fd_state_jacobian(const Reservoir& r, const Eigen::VectorXd& u, const Eigen::VectorXd& x, double h) {
  Eigen::MatrixXd j(x.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
    e(c) = h;
    j.col(c) = (step(r, u, x + e) - step(r, u, x - e)) / (2 * h);
  }
  return j;
}

Eigen::MatrixXd fd_block_jacobian(const Reservoir& r, const InputWindow<double>& block, const Eigen::VectorXd& x,
                                  double h) {
  const Eigen::Index k = block.dim(), m = block.length();
  Eigen::MatrixXd j(x.size(), k * m);
  for (Eigen::Index col = 0; col < m; ++col)
    for (Eigen::Index i = 0; i < k; ++i) {
      InputWindow<double> plus = block, minus = block;
      plus.vectors(i, col) += h;
      minus.vectors(i, col) -= h;
      j.col(col * k + i) = (m_fold_map(r, plus, x) - m_fold_map(r, minus, x)) / (2 * h);
    }
  return j;
}

}  // namespace

TEST_CASE("d2_g examples") {
  const auto r = generate_reservoir<double>(1, 4, 2, 0.9);
  CHECK(d2_g(r, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(4)) == r.recurrent_matrix());
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd u = rng.uniform_matrix(2, 1, -2, 2), x = rng.uniform_matrix(4, 1, -1, 1);
    CHECK(spectral_norm(d2_g(r, u, x)) <= 0.9 + 1e-12);
    CHECK((d2_g(r, u, x) - fd_state_jacobian(r, u, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
  }
  const auto leaky = generate_reservoir<double>(1, 4, 2, 0.9, 0.4);
  const Eigen::VectorXd u = rng.uniform_matrix(2, 1, -2, 2), x = rng.uniform_matrix(4, 1, -1, 1);
  CHECK((d2_g(leaky, u, x) - fd_state_jacobian(leaky, u, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(spectral_norm(d2_g(leaky, u, x)) <= 0.6 + 0.4 * 0.9 + 1e-12);
  CHECK_THROWS_AS(d2_g(r, Eigen::VectorXd::Zero(3), x), std::invalid_argument);
}

TEST_CASE("d1_F_blocks examples") {
  const auto r = generate_reservoir<double>(5, 3, 2, 0.8);
  const Eigen::VectorXd x = Eigen::Vector3d(0.2, -0.1, 0.4);

  const auto one = random_periodic_block(1, 1, 2);
  const Eigen::VectorXd pre = r.recurrent_matrix() * x + r.input_matrix() * one[0];
  const Eigen::VectorXd sech2 = (1.0 - pre.array().tanh().square()).matrix();
  CHECK((d1_F_blocks(r, one, x) - sech2.asDiagonal() * r.input_matrix()).norm() < 1e-15);

  const InputWindow<double> zero(Eigen::MatrixXd::Zero(2, 4), 4);
  const auto j0 = d1_F_blocks(r, zero, Eigen::VectorXd::Zero(3));
  Eigen::MatrixXd p = r.input_matrix();
  for (int k = 0; k < 4; ++k) {
    CHECK((j0.middleCols(2 * k, 2) - p).norm() < 1e-14);
    p = r.recurrent_matrix() * p;
  }

  const auto two = random_periodic_block(2, 2, 2);
  CHECK((d1_F_blocks(r, two, x) - fd_block_jacobian(r, two, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);

  const auto leaky = generate_reservoir<double>(5, 3, 2, 0.8, 0.5);
  CHECK_THROWS_AS(d1_F_blocks(leaky, two, x), UnsupportedConfiguration);
  CHECK_THROWS_AS(d1_F_blocks(r, random_periodic_block(2, 2, 3), x), std::invalid_argument);
}

TEST_CASE("property: derivatives match central differences") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng = Rng::stream(17, Stream::Generic, {s});
    const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto k = static_cast<Eigen::Index>(1 + rng.below(3));
    const auto m = static_cast<Eigen::Index>(1 + rng.below(5));
    const auto r = generate_reservoir<double>(s, n, k, rng.uniform(0.1, 1.5));
    const auto block = random_periodic_block(s + 1000, m, k, -1.0, 1.0);
    const Eigen::VectorXd x = rng.uniform_matrix(n, 1, -1, 1);
    CHECK((d2_g(r, block[0], x) - fd_state_jacobian(r, block[0], x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((d1_F_blocks(r, block, x) - fd_block_jacobian(r, block, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("Kalman-type matrix") {
  Eigen::Matrix2d w;
  w << 0, 1, 0, 0;
  const auto k = kalman_type_matrix<double>(Eigen::Vector2d::Ones(), w, Eigen::Vector2d(0, 1));
  Eigen::Matrix2d expected;
  expected << 0, 1, 1, 0;
  CHECK(k == expected);
  CHECK(numerical_rank(k).full_rank);

  const auto same = kalman_type_matrix<double>(Eigen::Vector2d::Ones(), Eigen::Matrix2d::Identity(),
                                               Eigen::Vector2d(1, 0));
  CHECK(same.col(0) == Eigen::Vector2d(1, 0));
  CHECK(same.col(1) == Eigen::Vector2d(1, 0));
  CHECK(numerical_rank(same).numerical_rank == 1);

  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd wr = rng.uniform_matrix(6, 6, -1, 1);
    const Eigen::VectorXd c = rng.uniform_matrix(6, 1, -1, 1);
    Eigen::MatrixXd classical(6, 6);
    Eigen::VectorXd col = c;
    for (int j = 0; j < 6; ++j) {
      classical.col(j) = col;
      col = wr * col;
    }
    CHECK((kalman_type_matrix<double>(Eigen::VectorXd::Ones(6), wr, c) - classical).norm() == 0.0);

    // general D: column k is (DW)^(k-1) D C
    const Eigen::VectorXd d = rng.uniform_matrix(6, 1, 0.1, 1);
    const auto kd = kalman_type_matrix<double>(d, wr, c);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(6, 6);
    for (int j = 0; j < 6; ++j) {
      CHECK((kd.col(j) - power * d.asDiagonal() * c).norm() < 1e-12 * (1 + kd.col(j).norm()));
      power = d.asDiagonal() * wr * power;
    }
  }
  CHECK_THROWS_AS(kalman_type_matrix<double>(Eigen::Vector3d::Ones(), w, Eigen::Vector2d(0, 1)),
                  std::invalid_argument);
}

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(Eigen::MatrixXd::Identity(5, 5)).numerical_rank == 5);
  Rng rng(6);
  const Eigen::VectorXd a = rng.uniform_matrix(6, 1, -1, 1), b = rng.uniform_matrix(4, 1, -1, 1);
  const auto outer = numerical_rank(Eigen::MatrixXd(a * b.transpose()));
  CHECK(outer.numerical_rank == 1);
  CHECK_FALSE(outer.full_rank);
  CHECK(outer.singular_values.size() == 4);
  CHECK(std::is_sorted(outer.singular_values.rbegin(), outer.singular_values.rend()));

  for (int s = 0; s < 100; ++s) {
    const Eigen::MatrixXd g = gaussian(rng, 5, 8);
    const auto rep = numerical_rank(g);
    CHECK(rep.numerical_rank == 5);
    CHECK(rep.full_rank);
    CHECK(elimination_rank(g, rep.tolerance_used) == 5);
    CHECK(rep.tolerance_used == doctest::Approx(1e-10 * rep.singular_values.front() * 8));
  }

  // rank is invariant under row/column permutations
  Eigen::MatrixXd low = gaussian(rng, 7, 3) * gaussian(rng, 3, 6);
  const auto base = numerical_rank(low).numerical_rank;
  CHECK(base == 3);
  CHECK(elimination_rank(low, 1e-10 * 7 * low.norm()) == 3);
  Eigen::PermutationMatrix<Eigen::Dynamic> pr(7), pc(6);
  pr.setIdentity();
  pc.setIdentity();
  std::swap(pr.indices()(0), pr.indices()(5));
  std::swap(pc.indices()(1), pc.indices()(4));
  CHECK(numerical_rank(Eigen::MatrixXd(pr * low * pc)).numerical_rank == base);

  CHECK_THROWS_AS(numerical_rank(Eigen::MatrixXd(0, 0)), std::invalid_argument);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Ones(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(numerical_rank(nan), std::invalid_argument);
}

TEST_CASE("check_G1") {
  const auto r = generate_reservoir<double>(1, 5, 2, 0.99);
  const auto g = check_G1(r, 200, 4);
  CHECK(g.holds);
  CHECK(g.analytic_bound == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(g.sampled_max <= 0.99 + 1e-12);

  const Reservoir zero(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Ones(3, 1), 1.0);
  CHECK(check_G1(zero, 10, 1).holds);
  CHECK(check_G1(zero, 10, 1).analytic_bound == 0.0);

  CHECK_FALSE(check_G1(generate_reservoir<double>(1, 5, 2, 1.2), 10, 1).holds);
  CHECK_THROWS_AS(check_G1(r, 0, 1), std::invalid_argument);
}

TEST_CASE("check_G2") {
  const auto r = generate_reservoir<double>(1, 5, 2, 0.99);
  const auto rep = check_G2(r, random_periodic_block(1, 30, 2));
  CHECK(rep.matrix_rows == 5);
  CHECK(rep.matrix_cols == 60);
  CHECK(rep.full_rank);

  // zero block reduces to the controllability matrix of (W, W_in)
  const InputWindow<double> zero(Eigen::MatrixXd::Zero(2, 30), 30);
  const auto z = check_G2(r, zero);
  Eigen::MatrixXd ctrl(5, 60);
  Eigen::MatrixXd p = r.input_matrix();
  for (int k = 0; k < 30; ++k) {
    ctrl.middleCols(2 * k, 2) = p;
    p = r.recurrent_matrix() * p;
  }
  CHECK(z.numerical_rank == numerical_rank(ctrl).numerical_rank);
  CHECK(z.full_rank);

  const Reservoir no_input(r.recurrent_matrix(), Eigen::MatrixXd::Zero(5, 2), 1.0);
  const auto none = check_G2(no_input, random_periodic_block(1, 30, 2));
  CHECK(none.numerical_rank == 0);
  CHECK_FALSE(none.full_rank);

  CHECK_THROWS_AS(check_G2(r, random_periodic_block(1, 2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(check_G2(generate_reservoir<double>(1, 5, 2, 1.1), random_periodic_block(1, 30, 2)),
                  PreconditionError);
}

TEST_CASE("perturbation persistence") {
  const auto r = generate_reservoir<double>(2, 5, 2, 0.9);
  const auto block = random_periodic_block(2, 30, 2);
  const auto zero_radius = perturbation_persistence(r, block, 0.0, 5, 1);
  CHECK(zero_radius.fraction == 1.0);
  CHECK(zero_radius.tested == 5);
  const auto tiny = perturbation_persistence(r, block, 1e-6, 50, 1);
  CHECK(tiny.fraction == 1.0);
  CHECK(tiny.tested + tiny.skipped == 50);

  // near the unit circle most perturbations are skipped
  const auto edge = generate_reservoir<double>(2, 5, 2, 0.999999);
  const auto rep = perturbation_persistence(edge, block, 0.1, 20, 1);
  CHECK(rep.skipped > 0);
  CHECK(rep.tested + rep.skipped == 20);

  CHECK_THROWS_AS(perturbation_persistence(r, block, -1.0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(perturbation_persistence(r, block, 1e-6, 0, 1), std::invalid_argument);
}

TEST_CASE("dimension bound") {
  CHECK(dimension_bound(std::vector<double>{-0.1, -0.5}) == 0.0);
  CHECK(dimension_bound(std::vector<double>{0.5, 0.2}) == 2.0);
  // 1 + 0.3 / 0.6
  CHECK(dimension_bound(std::vector<double>{0.3, -0.6, -1.0}) == doctest::Approx(1.5));
  // sum of the first two stays >= 0: 2 + 0.2 / 0.4
  CHECK(dimension_bound(std::vector<double>{0.5, -0.3, -0.4}) == doctest::Approx(2.5));
}

TEST_CASE("conditional Lyapunov exponents") {
  Eigen::Matrix2d w;
  w << 0.5, 0.0, 0.0, 0.25;
  const Reservoir diag(w, Eigen::MatrixXd::Ones(2, 1), 1.0);
  const InputWindow<double> zeros(Eigen::MatrixXd::Zero(1, 500));
  const auto rep = conditional_lyapunov(diag, zeros, Eigen::Vector2d::Zero());
  CHECK(std::abs(rep.exponents[0] - std::log(0.5)) < 1e-12);
  CHECK(std::abs(rep.exponents[1] - std::log(0.25)) < 1e-12);
  CHECK(rep.dimension_bound == 0.0);
  CHECK(rep.steps_used == 500);
  const auto every5 = conditional_lyapunov(diag, zeros, Eigen::Vector2d::Zero(), 5);
  CHECK(std::abs(every5.exponents[1] - std::log(0.25)) < 1e-12);

  const Reservoir zero(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Ones(3, 1), 1.0);
  const auto dead = conditional_lyapunov(zero, InputWindow<double>(Eigen::MatrixXd::Ones(1, 50)),
                                         Eigen::VectorXd::Zero(3));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(dead.exponents[j] == kLogFloor);
    CHECK(dead.capped[j]);
  }

  CHECK_THROWS_AS(conditional_lyapunov(diag, InputWindow<double>(Eigen::MatrixXd(1, 0)), Eigen::Vector2d::Zero()),
                  std::invalid_argument);
}

TEST_CASE("property: exponents of a contraction lie below log mu") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng = Rng::stream(23, Stream::Generic, {s});
    const auto n = static_cast<Eigen::Index>(2 + rng.below(8));
    const auto r = generate_reservoir<double>(s, n, 2, rng.uniform(0.1, 0.99), s % 3 ? 1.0 : 0.6);
    const InputWindow<double> u(rng.uniform_matrix(2, 300, -1, 1));
    const auto rep = conditional_lyapunov(r, u, Eigen::VectorXd::Zero(n), 1 + static_cast<int>(s % 4));
    const double mu = contraction_report(r).state_lipschitz;
    CHECK(rep.exponents.front() <= std::log(mu) + 1e-9);
    CHECK(std::is_sorted(rep.exponents.rbegin(), rep.exponents.rend()));
    CHECK(rep.dimension_bound == 0.0);
  }
}
