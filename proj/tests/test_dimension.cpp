#include <doctest.h>

#include <cmath>

#include "rcdim/dimension.hpp"
#include "rcdim/random.hpp"

using namespace rcdim;

namespace {

PointCloud<double> uniform_cloud(std::uint64_t seed, Eigen::Index n, Eigen::Index dim) {
  Rng rng(seed);
  return {rng.uniform_matrix(n, dim, 0.0, 1.0), "uniform", {}, {}};
}

// Left endpoints of the depth-`depth` intervals of the middle-thirds construction.
PointCloud<double> cantor(int depth) {
  const auto n = Eigen::Index{1} << depth;
  PointCloud<double> c;
  c.points.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = 0.0, scale = 1.0;
    for (int k = depth - 1; k >= 0; --k) {
      scale /= 3.0;
      if ((i >> k) & 1) x += 2.0 * scale;
    }
    c.points(i, 0) = x;
  }
  return c;
}

std::uint64_t brute_pairs_below(const PointCloud<double>& c, double r, int theiler) {
  std::uint64_t count = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    for (Eigen::Index j = i + 1; j < c.size(); ++j) {
      if (c.has_ordering() && c.segment[i] == c.segment[j] && std::abs(c.time[i] - c.time[j]) < theiler)
        continue;
      if ((c.points.row(i) - c.points.row(j)).squaredNorm() < r * r) ++count;
    }
  return count;
}

}  // namespace

TEST_CASE("correlation sum examples") {
  const PointCloud<double> twin{Eigen::MatrixXd::Ones(2, 3), "t", {}, {}};
  const std::vector<double> radii{1e-9, 0.5, 10.0};
  const auto c = correlation_sum(twin, radii);
  for (double v : c.values) CHECK(v == 1.0);

  // segment of length L: C(r) = 2r/L - (r/L)^2
  const double L = 2.0;
  Rng rng(3);
  PointCloud<double> seg{rng.uniform_matrix(4000, 1, 0.0, L), "segment", {}, {}};
  const std::vector<double> rs{0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  const auto cs = correlation_sum(seg, rs);
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double q = rs[k] / L;
    const double expected = 2 * q - q * q;
    CHECK(std::abs(cs.values[k] - expected) < 0.03 * expected + 1e-3);
  }

  const auto sq = uniform_cloud(1, 10000, 2);
  const auto est = estimate_dimension(sq);
  CHECK(est.value == doctest::Approx(2.0).epsilon(0.05));

  CHECK_THROWS_AS(correlation_sum(PointCloud<double>{Eigen::MatrixXd::Ones(1, 2), "", {}, {}}, radii),
                  std::invalid_argument);
  const std::vector<double> bad{0.5, 0.1};
  CHECK_THROWS_AS(correlation_sum(sq, bad), std::invalid_argument);
}

TEST_CASE("correlation sum agrees with brute force, with and without Theiler exclusion") {
  auto c = uniform_cloud(5, 300, 3);
  const std::vector<double> radii{0.05, 0.1, 0.2, 0.4, 0.8};
  const auto plain = correlation_sum(c, radii, 10, 1);
  const double all = 300.0 * 299.0 / 2.0;
  for (std::size_t k = 0; k < radii.size(); ++k)
    CHECK(plain.values[k] == static_cast<double>(brute_pairs_below(c, radii[k], 0)) / all);

  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c.segment.push_back(i / 100);
    c.time.push_back(i % 100);
  }
  const auto th = correlation_sum(c, radii, 10, 3);
  // three segments of 100: pairs at least 10 apart within a segment
  const double within = 3.0 * (90.0 * 91.0 / 2.0), across = 3.0 * 100.0 * 100.0;
  for (std::size_t k = 0; k < radii.size(); ++k)
    CHECK(th.values[k] == static_cast<double>(brute_pairs_below(c, radii[k], 10)) / (within + across));
  CHECK(th.values == correlation_sum(c, radii, 10, 1).values);
}

TEST_CASE("Theiler window on a single short segment") {
  PointCloud<double> c{Eigen::MatrixXd::Zero(20, 1), "t", std::vector<std::int64_t>(20, 0), {}};
  for (int i = 0; i < 20; ++i) c.time.push_back(i);
  const PairDistanceHistogram h(c, 10);
  CHECK(h.eligible_pairs() == 55);
  const PairDistanceHistogram none(c, 0);
  CHECK(none.eligible_pairs() == 190);
}

TEST_CASE("pair histogram and correlation sum count the same pairs") {
  auto c = uniform_cloud(8, 700, 4);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c.segment.push_back(i % 3);
    c.time.push_back(i / 3);
  }
  const PairDistanceHistogram h(c, 10, 2);
  std::vector<std::size_t> bins;
  std::vector<double> radii;
  for (std::size_t b = PairDistanceHistogram::bin_of(1e-3); b < PairDistanceHistogram::bin_of(3.0); b += 37) {
    const double r = std::sqrt(PairDistanceHistogram::edge(b));
    if (r * r != PairDistanceHistogram::edge(b)) continue;  // keep radii whose square is exact
    bins.push_back(b);
    radii.push_back(r);
  }
  REQUIRE(radii.size() > 5);
  const auto curve = correlation_sum(c, radii, 10, 1);
  for (std::size_t k = 0; k < bins.size(); ++k)
    CHECK(static_cast<double>(h.count_below_edge(bins[k])) / static_cast<double>(h.eligible_pairs()) ==
          curve.values[k]);
  CHECK(h.count_below_edge(h.top_edge()) == h.eligible_pairs());
}

TEST_CASE("histogram bins are monotone in distance") {
  double prev = 0.0;
  for (double d2 = 1e-20; d2 < 1e20; d2 *= 1.7) {
    const auto b = PairDistanceHistogram::bin_of(d2);
    CHECK(PairDistanceHistogram::edge(b) <= d2);
    CHECK(PairDistanceHistogram::edge(b + 1) > d2);
    CHECK(PairDistanceHistogram::edge(b) >= prev);
    prev = PairDistanceHistogram::edge(b);
  }
}

TEST_CASE("box counting examples") {
  const PointCloud<double> single{Eigen::MatrixXd::Constant(1, 3, 0.2), "p", {}, {}};
  const std::vector<double> eps{0.001, 0.1, 1.0};
  for (double v : box_count(single, eps).values) CHECK(v == 1.0);

  PointCloud<double> lattice;
  lattice.points.resize(10000, 2);
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) lattice.points.row(100 * i + j) << (i + 0.5) / 100.0, (j + 0.5) / 100.0;
  const std::vector<int> ks{2, 4, 5, 10, 20, 25, 50};
  std::vector<double> grid;
  for (auto it = ks.rbegin(); it != ks.rend(); ++it) grid.push_back(1.0 / *it);
  const auto counts = box_count(lattice, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int k = ks[ks.size() - 1 - i];
    CHECK(counts.values[i] == static_cast<double>(k * k));
  }

  const auto c = cantor(12);
  EstimatorSettings s;
  s.method = DimensionMethod::BoxCounting;
  const auto est = estimate_dimension(c, s);
  CHECK(std::abs(est.value - std::log(2.0) / std::log(3.0)) < 0.05);

  CHECK_THROWS_AS(box_count(PointCloud<double>{}, eps), std::invalid_argument);
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(box_count(lattice, zero), std::invalid_argument);
}

TEST_CASE("property: monotone scaling curves") {
  const auto c = uniform_cloud(13, 2000, 3);
  std::vector<double> radii;
  for (int i = 0; i < 30; ++i) radii.push_back(0.01 * std::pow(1.2, i));
  const auto cs = correlation_sum(c, radii);
  const auto bc = box_count(c, radii);
  for (std::size_t i = 1; i < radii.size(); ++i) {
    CHECK(cs.values[i] >= cs.values[i - 1]);
    CHECK(bc.values[i] <= bc.values[i - 1]);
  }
}

TEST_CASE("fit_dimension") {
  ScalingCurve power;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.001 * std::pow(1.5, i);
    power.radii.push_back(r);
    power.values.push_back(std::pow(r, 1.5));
  }
  const auto est = fit_dimension(power, FitRange::automatic());
  CHECK(std::abs(est.value - 1.5) < 1e-6);
  CHECK(est.fit_range.first == 2);
  CHECK(est.fit_range.second == 17);
  CHECK(est.fit_residual < 1e-9);
  CHECK(std::abs(fit_dimension(power, FitRange::manual(0, 4)).value - 1.5) < 1e-9);
  CHECK(fit_dimension(power, FitRange::small_scale()).fit_range == std::pair<Eigen::Index, Eigen::Index>{0, 4});

  // box counting reports the negated slope
  ScalingCurve boxes = power;
  boxes.method = DimensionMethod::BoxCounting;
  for (auto& v : boxes.values) v = 1.0 / v;
  CHECK(std::abs(fit_dimension(boxes, FitRange::automatic()).value - 1.5) < 1e-6);

  // slopes alternating 1 and 3 never form a stable window
  ScalingCurve zigzag;
  double logc = -20.0;
  for (int i = 0; i < 20; ++i) {
    zigzag.radii.push_back(std::exp(0.1 * i));
    zigzag.values.push_back(std::exp(logc));
    logc += 0.1 * (i % 2 ? 1.0 : 3.0);
  }
  CHECK_THROWS_AS(fit_dimension(zigzag, FitRange::automatic()), EstimationFailed);
  CHECK_THROWS_AS(fit_dimension(power, FitRange::manual(0, 2)), std::invalid_argument);

  // a kink: the longer straight piece wins
  ScalingCurve kink;
  for (int i = 0; i < 30; ++i) {
    const double lr = 0.1 * i;
    kink.radii.push_back(std::exp(lr));
    kink.values.push_back(std::exp(i < 18 ? 2.0 * lr : 2.0 * 1.8 + 0.5 * (lr - 1.8)));
  }
  CHECK(std::abs(fit_dimension(kink, FitRange::automatic()).value - 2.0) < 1e-9);
}

TEST_CASE("fit range parsing round-trips") {
  for (const auto& r : {FitRange::automatic(), FitRange::small_scale(), FitRange::manual(3, 11)})
    CHECK(parse_fit_range(to_string(r)) == r);
  CHECK_THROWS_AS(parse_fit_range("manual(3)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fit_range("sometimes"), std::invalid_argument);
  CHECK(parse_dimension_method("box") == DimensionMethod::BoxCounting);
  CHECK(parse_dimension_method(to_string(DimensionMethod::Correlation)) == DimensionMethod::Correlation);
  CHECK(parse_lower_rule(to_string(LowerRadiusRule::MinPairs)) == LowerRadiusRule::MinPairs);
  CHECK(parse_standardize(to_string(Standardize::Whiten)) == Standardize::Whiten);
}

TEST_CASE("degenerate clouds have dimension zero") {
  const PointCloud<double> one{Eigen::MatrixXd::Constant(1, 4, 0.3), "p", {}, {}};
  CHECK(estimate_dimension(one).value == 0.0);
  const PointCloud<double> same{Eigen::MatrixXd::Constant(50, 4, 0.3), "p", {}, {}};
  CHECK(estimate_dimension(same).value == 0.0);
  PointCloud<double> tiny = uniform_cloud(1, 50, 2);
  tiny.points *= 1e-10;
  CHECK(estimate_dimension(tiny).value == 0.0);
}

TEST_CASE("property: isometry invariance and scale covariance") {
  const auto c = uniform_cloud(21, 3000, 3);
  const auto base = estimate_dimension(c).value;

  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  PointCloud<double> moved = c;
  moved.points = (c.points * rot.transpose()).rowwise() + Eigen::RowVector3d(5.0, -3.0, 0.25);
  CHECK(std::abs(estimate_dimension(moved).value - base) < 1e-9);

  PointCloud<double> scaled = c;
  scaled.points *= 7.3;
  ScalingCurve a, b;
  estimate_dimension(c, {}, &a);
  const auto s = estimate_dimension(scaled, {}, &b).value;
  CHECK(std::abs(s - base) < 0.02);
  CHECK(b.radii.front() / a.radii.front() == doctest::Approx(7.3).epsilon(0.02));
}

TEST_CASE("property: subsample estimate does not exceed the full estimate by much") {
  const auto c = uniform_cloud(4, 8000, 3);
  const double full = estimate_dimension(c).value;
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    CHECK(full >= estimate_dimension(subsample(c, 800, seed)).value - 0.2);
}

TEST_CASE("whitening and subsampling") {
  Rng rng(9);
  PointCloud<double> c{rng.uniform_matrix(5000, 3, -1, 1), "w", {}, {}};
  Eigen::Matrix3d a;
  a << 3, 0.5, 0, 0, 0.2, 0.1, 1, 0, 0.05;
  c.points = c.points * a.transpose();
  const auto w = whiten(c);
  const Eigen::MatrixXd centered = w.points.rowwise() - w.points.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 4999.0;
  CHECK((cov - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);

  PointCloud<double> ordered = c;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    ordered.segment.push_back(0);
    ordered.time.push_back(i);
  }
  const auto s = subsample(ordered, 100, 7);
  CHECK(s.size() == 100);
  CHECK(std::is_sorted(s.time.begin(), s.time.end()));
  CHECK(s.points == subsample(ordered, 100, 7).points);
  CHECK(s.points.row(0) == c.points.row(s.time[0]));
  CHECK(subsample(ordered, 10000, 7).size() == 5000);
}

TEST_CASE("estimator settings: min-pairs rule and box-counting path") {
  const auto sq = uniform_cloud(2, 5000, 2);
  EstimatorSettings s;
  s.lower_rule = LowerRadiusRule::MinPairs;
  s.lower_parameter = 500;
  s.range = FitRange::small_scale();
  CHECK(std::abs(estimate_dimension(sq, s).value - 2.0) < 0.2);

  EstimatorSettings bad;
  bad.radii_count = 2;
  CHECK_THROWS_AS(estimate_dimension(sq, bad), std::invalid_argument);

  ScalingCurve curve;
  EstimatorSettings box;
  box.method = DimensionMethod::BoxCounting;
  const auto seg = uniform_cloud(3, 5000, 1);
  const auto e = estimate_dimension(seg, box, &curve);
  CHECK(curve.method == DimensionMethod::BoxCounting);
  CHECK(e.method == DimensionMethod::BoxCounting);
  CHECK(std::abs(e.value - 1.0) < 0.05);
  CHECK_FALSE(e.exceeds_ambient);
}
