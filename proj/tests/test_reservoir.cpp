#include <doctest.h>

#include <cmath>

#include "rcdim/reservoir.hpp"

using namespace rcdim;

namespace {

// Largest singular value from the eigenvalues of W^T W, as a cross-check on
// the JacobiSVD path.
double norm_via_gram(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.transpose() * w);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

double norm_via_power(const Eigen::MatrixXd& w) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(w.cols());
  double s = 0.0;
  for (int i = 0; i < 5000; ++i) {
    Eigen::VectorXd next = w.transpose() * (w * v);
    s = std::sqrt(next.norm() / v.norm());
    v = next.normalized();
  }
  return s;
}

double bisect_fixed_point(double w, double b) {
  // root of z - tanh(w z + b) on [-1, 1]
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - std::tanh(w * mid + b) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("generate_reservoir hits the target spectral norm") {
  const auto r = generate_reservoir<double>(1, 5, 2, 0.99);
  CHECK(r.state_dim() == 5);
  CHECK(r.input_dim() == 2);
  CHECK(std::abs(norm_via_gram(r.recurrent_matrix()) - 0.99) < 1e-10);
  CHECK(std::abs(spectral_norm(r.recurrent_matrix()) - 0.99) < 1e-10);

  const auto one = generate_reservoir<double>(42, 1, 1, 0.5);
  CHECK(std::abs(one.recurrent_matrix()(0, 0)) == doctest::Approx(0.5).epsilon(1e-14));

  const auto a = generate_reservoir<double>(7, 3, 2, 1.2);
  const auto b = generate_reservoir<double>(7, 3, 2, 1.2);
  CHECK(a == b);
  CHECK(std::abs(norm_via_power(a.recurrent_matrix()) - 1.2) < 1e-9);
  CHECK(a.input_matrix().cwiseAbs().maxCoeff() <= 1.0);
  CHECK(!(a == generate_reservoir<double>(8, 3, 2, 1.2)));
}

TEST_CASE("generate_reservoir rejects bad arguments") {
  CHECK_THROWS_AS(generate_reservoir<double>(1, 0, 2, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(generate_reservoir<double>(1, 3, 0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(generate_reservoir<double>(1, 3, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_reservoir<double>(1, 3, 2, -1.0), std::invalid_argument);
}

TEST_CASE("ReservoirParams validates shapes, leak rate and finiteness") {
  using M = Eigen::MatrixXd;
  CHECK_THROWS_AS(Reservoir(M::Zero(2, 3), M::Zero(2, 1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Reservoir(M::Zero(2, 2), M::Zero(3, 1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Reservoir(M::Zero(2, 2), M::Zero(2, 1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Reservoir(M::Zero(2, 2), M::Zero(2, 1), 1.5), std::invalid_argument);
  M bad = M::Zero(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(Reservoir(bad, M::Zero(2, 1), 1.0), std::invalid_argument);
  CHECK_NOTHROW(Reservoir(M::Zero(2, 2), M::Zero(2, 1), 1.0));
}

TEST_CASE("step examples") {
  using M = Eigen::MatrixXd;
  const Reservoir zero(M::Zero(3, 3), M::Zero(3, 2), 1.0);
  CHECK(step(zero, Eigen::Vector2d(0.3, -2.0), Eigen::Vector3d(0.1, 0.2, 0.3)).isZero(0.0));

  const Reservoir scalar(M::Constant(1, 1, 0.5), M::Constant(1, 1, 1.0), 1.0);
  CHECK(step(scalar, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1))(0) == 0.0);

  const double z = bisect_fixed_point(0.5, 1.0);
  CHECK(z == doctest::Approx(0.8953).epsilon(1e-4));
  const double next = step(scalar, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, 0.8953))(0);
  CHECK(std::abs(next - 0.8953) < 1e-3);
  CHECK(std::abs(step(scalar, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, z))(0) - z) < 1e-14);

  CHECK_THROWS_AS(step(scalar, Eigen::Vector2d(1, 1), Eigen::VectorXd::Zero(1)), std::invalid_argument);
  CHECK_THROWS_AS(step(scalar, Eigen::VectorXd::Zero(1), Eigen::Vector2d(1, 1)), std::invalid_argument);
}

TEST_CASE("leaky step matches the componentwise formula") {
  auto r = generate_reservoir<double>(3, 4, 2, 0.8, 0.3);
  Rng rng(11);
  const Eigen::MatrixXd u = rng.uniform_matrix(2, 1, -1, 1);
  const Eigen::MatrixXd x = rng.uniform_matrix(4, 1, -1, 1);
  const Eigen::VectorXd expected =
      0.7 * x + 0.3 * (r.recurrent_matrix() * x + r.input_matrix() * u).array().tanh().matrix();
  CHECK((step(r, u, x) - expected).norm() < 1e-15);
}

TEST_CASE("contraction_report examples") {
  const auto r = generate_reservoir<double>(1, 5, 2, 0.99);
  const auto c = contraction_report(r);
  CHECK(c.state_lipschitz == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(c.is_contraction);

  const Reservoir zero(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Ones(3, 1), 1.0);
  CHECK(contraction_report(zero).state_lipschitz == 0.0);
  CHECK(contraction_report(zero).input_lipschitz == doctest::Approx(std::sqrt(3.0)));

  const auto leaky = generate_reservoir<double>(2, 4, 1, 0.8, 0.5);
  CHECK(contraction_report(leaky).state_lipschitz == doctest::Approx(0.9).epsilon(1e-12));

  const auto big = generate_reservoir<double>(2, 4, 1, 1.05);
  CHECK_FALSE(contraction_report(big).is_contraction);
}

TEST_CASE("property: boundedness, contraction and input Lipschitz over random triples") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng = Rng::stream(99, Stream::Generic, {s});
    const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto k = static_cast<Eigen::Index>(1 + rng.below(4));
    const double norm = rng.uniform(0.05, 0.999);
    const double alpha = rng.uniform(0.05, 1.0);
    const auto r = generate_reservoir<double>(s, n, k, norm, s % 2 ? 1.0 : alpha);
    const auto c = contraction_report(r);
    REQUIRE(c.is_contraction);
    const Eigen::MatrixXd u = rng.uniform_matrix(k, 1, -3, 3);
    const Eigen::MatrixXd v = rng.uniform_matrix(k, 1, -3, 3);
    const Eigen::MatrixXd x = rng.uniform_matrix(n, 1, -1, 1);
    const Eigen::MatrixXd z = rng.uniform_matrix(n, 1, -1, 1);
    const Eigen::VectorXd gx = step(r, u, x);
    if (r.leak_rate() == 1.0) CHECK(gx.cwiseAbs().maxCoeff() < 1.0);
    CHECK((gx - step(r, u, z)).norm() <= c.state_lipschitz * (x - z).norm() + 1e-14);
    CHECK((gx - step(r, v, x)).norm() <= c.input_lipschitz * (u - v).norm() + 1e-14);
  }
}

TEST_CASE("Rng streams are deterministic and distinct") {
  Rng a = Rng::stream(5, Stream::Block, {1, 2});
  Rng b = Rng::stream(5, Stream::Block, {1, 2});
  Rng c = Rng::stream(5, Stream::Block, {2, 1});
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  Rng u(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.unit();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.below(7) < 7);
  }
  // mt19937_64's 10000th output is fixed by the standard.
  std::mt19937_64 ref;
  ref.discard(9999);
  CHECK(ref() == 9981545732273789042ULL);
}
