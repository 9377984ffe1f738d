#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rcdim/pullback.hpp"

namespace rcdim {

enum class DimensionMethod { Correlation, BoxCounting };

std::string to_string(DimensionMethod method);
DimensionMethod parse_dimension_method(const std::string& name);

/// C(r) against r (correlation) or N(Z, eps) against eps (box counting).
struct ScalingCurve {
  std::vector<double> radii;
  std::vector<double> values;
  DimensionMethod method = DimensionMethod::Correlation;
  Eigen::Index ambient_dim = 0;

  std::size_t size() const noexcept { return radii.size(); }
  /// (log r, log value) for every point with a positive value.
  std::vector<std::pair<double, double>> log_log_pairs() const;
};

/// How the scaling window is chosen for the least-squares fit.
///  Auto:       longest window (>= min_window points) whose local slopes all
///              lie within slope_tolerance of the window median, ignoring the
///              outer edge_fraction of radii at each end.
///  SmallScale: the small_scale_window smallest radii with a nonzero value.
///  Manual:     curve indices [low, high], inclusive.
struct FitRange {
  enum class Kind { Auto, SmallScale, Manual };
  Kind kind = Kind::Auto;
  Eigen::Index low = 0;
  Eigen::Index high = 0;

  static FitRange automatic() { return {}; }
  static FitRange small_scale() { return {Kind::SmallScale, 0, 0}; }
  static FitRange manual(Eigen::Index lo, Eigen::Index hi) { return {Kind::Manual, lo, hi}; }

  bool operator==(const FitRange&) const = default;
};

std::string to_string(const FitRange& range);
FitRange parse_fit_range(const std::string& text);

struct FitOptions {
  double slope_tolerance = 0.2;
  Eigen::Index min_window = 5;
  double edge_fraction = 0.1;
  Eigen::Index small_scale_window = 5;

  bool operator==(const FitOptions&) const = default;
};

struct DimensionEstimate {
  double value = 0.0;
  std::pair<Eigen::Index, Eigen::Index> fit_range{0, 0};
  double fit_residual = 0.0;
  DimensionMethod method = DimensionMethod::Correlation;
  bool exceeds_ambient = false;  ///< value > ambient dimension + 0.5
};

/// C(r) = #{i < j : ||p_i - p_j|| < r} / #eligible pairs. When the cloud
/// carries a time ordering, pairs from the same segment less than
/// `theiler_window` steps apart are not eligible. Exact O(N^2) pair count.
ScalingCurve correlation_sum(const PointCloud<double>& cloud, std::span<const double> radii,
                             int theiler_window = 10, int threads = 1);

/// Occupied cells of an axis-aligned grid of side eps anchored at the
/// coordinatewise minimum of the cloud.
ScalingCurve box_count(const PointCloud<double>& cloud, std::span<const double> epsilons);

/// Least-squares slope of the log-log curve over the selected range.
DimensionEstimate fit_dimension(const ScalingCurve& curve, const FitRange& range,
                                const FitOptions& options = {});

/// Histogram of squared pair distances with log-spaced bins whose edges are
/// exactly representable doubles, so counts below any edge are exact.
class PairDistanceHistogram {
 public:
  PairDistanceHistogram(const PointCloud<double>& cloud, int theiler_window, int threads = 1);

  std::uint64_t eligible_pairs() const noexcept { return eligible_; }
  /// Number of eligible pairs with squared distance strictly below edge(bin).
  std::uint64_t count_below_edge(std::size_t bin) const { return cumulative_[bin]; }
  /// Squared distance at the lower edge of `bin`.
  static double edge(std::size_t bin);
  /// Largest bin whose lower edge is <= squared_distance.
  static std::size_t bin_of(double squared_distance);
  /// Smallest edge bin with at least `k` pairs below it.
  std::size_t first_edge_with_count(std::uint64_t k) const;
  /// Upper edge bin of the largest occupied bin (an upper bound on diameter^2).
  std::size_t top_edge() const;
  std::size_t bin_count() const noexcept { return cumulative_.size(); }

 private:
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t eligible_ = 0;
};

enum class Standardize { None, Whiten };
enum class LowerRadiusRule { Percentile, MinPairs };

std::string to_string(Standardize s);
Standardize parse_standardize(const std::string& name);
std::string to_string(LowerRadiusRule r);
LowerRadiusRule parse_lower_rule(const std::string& name);

/// End-to-end estimator configuration. The defaults give the correlation
/// dimension over 24 log-spaced radii between the 0.01% quantile of pair
/// distances and half the diameter, with an automatic fit window. Boundary
/// curvature at large radii biases the slope down, so the grid starts low.
struct EstimatorSettings {
  DimensionMethod method = DimensionMethod::Correlation;
  int radii_count = 24;
  LowerRadiusRule lower_rule = LowerRadiusRule::Percentile;
  double lower_parameter = 1e-4;  ///< quantile, or pair count for MinPairs
  FitRange range = FitRange::automatic();
  FitOptions fit;
  int theiler_window = 10;
  Standardize standardize = Standardize::None;
  Eigen::Index max_points = 100000;  ///< larger clouds are subsampled
  std::uint64_t seed = 0;            ///< subsampling stream
  double degenerate_diameter = 1e-8;
  int threads = 1;

  bool operator==(const EstimatorSettings&) const = default;
};

/// Affine whitening x -> S^{-1/2}(x - mean) with the symmetric inverse square
/// root of the sample covariance; directions with variance below 1e-12 of the
/// largest are dropped. Box-counting and correlation dimension are invariant
/// under affine bijections.
PointCloud<double> whiten(const PointCloud<double>& cloud);

/// Seeded subsample without replacement, keeping the original order.
PointCloud<double> subsample(const PointCloud<double>& cloud, Eigen::Index count, std::uint64_t seed);

/// Single points and clouds with diameter below settings.degenerate_diameter
/// are reported as dimension 0.
DimensionEstimate estimate_dimension(const PointCloud<double>& cloud,
                                     const EstimatorSettings& settings = {},
                                     ScalingCurve* curve_out = nullptr);

/// Radii grid used by estimate_dimension, snapped to histogram edges.
std::vector<double> default_radii(const PairDistanceHistogram& histogram,
                                  const EstimatorSettings& settings);

}  // namespace rcdim
