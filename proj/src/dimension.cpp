#include "rcdim/dimension.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rcdim/errors.hpp"
#include "rcdim/random.hpp"

namespace rcdim {

std::string to_string(DimensionMethod method) {
  return method == DimensionMethod::Correlation ? "correlation" : "box";
}

DimensionMethod parse_dimension_method(const std::string& name) {
  if (name == "correlation") return DimensionMethod::Correlation;
  if (name == "box" || name == "box-counting") return DimensionMethod::BoxCounting;
  throw std::invalid_argument("unknown dimension method '" + name + "' (expected correlation|box)");
}

std::string to_string(const FitRange& range) {
  switch (range.kind) {
    case FitRange::Kind::Auto: return "auto";
    case FitRange::Kind::SmallScale: return "small-scale";
    case FitRange::Kind::Manual:
      return "manual(" + std::to_string(range.low) + "," + std::to_string(range.high) + ")";
  }
  return "auto";
}

FitRange parse_fit_range(const std::string& text) {
  if (text == "auto") return FitRange::automatic();
  if (text == "small-scale") return FitRange::small_scale();
  if (text.rfind("manual(", 0) == 0 && text.back() == ')') {
    const auto inner = text.substr(7, text.size() - 8);
    const auto comma = inner.find(',');
    if (comma != std::string::npos) {
      try {
        std::size_t used_lo = 0, used_hi = 0;
        const auto lo_text = inner.substr(0, comma);
        const auto hi_text = inner.substr(comma + 1);
        const long lo = std::stol(lo_text, &used_lo);
        const long hi = std::stol(hi_text, &used_hi);
        if (used_lo == lo_text.size() && used_hi == hi_text.size() && lo >= 0 && hi > lo)
          return FitRange::manual(lo, hi);
      } catch (const std::exception&) {
      }
    }
  }
  throw std::invalid_argument("bad fit range '" + text + "' (expected auto|small-scale|manual(lo,hi))");
}

std::string to_string(Standardize s) { return s == Standardize::None ? "none" : "whiten"; }

Standardize parse_standardize(const std::string& name) {
  if (name == "none") return Standardize::None;
  if (name == "whiten") return Standardize::Whiten;
  throw std::invalid_argument("unknown standardize mode '" + name + "' (expected none|whiten)");
}

std::string to_string(LowerRadiusRule r) {
  return r == LowerRadiusRule::Percentile ? "percentile" : "min-pairs";
}

LowerRadiusRule parse_lower_rule(const std::string& name) {
  if (name == "percentile") return LowerRadiusRule::Percentile;
  if (name == "min-pairs") return LowerRadiusRule::MinPairs;
  throw std::invalid_argument("unknown lower radius rule '" + name + "' (expected percentile|min-pairs)");
}

std::vector<std::pair<double, double>> ScalingCurve::log_log_pairs() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (values[i] > 0.0) out.emplace_back(std::log(radii[i]), std::log(values[i]));
  return out;
}

namespace {

constexpr int kMantissaBits = 6;
constexpr int kBinShift = 52 - kMantissaBits;
constexpr std::size_t kBinCount = std::size_t{1} << (11 + kMantissaBits);
constexpr Eigen::Index kBlock = 512;

/// Calls sink(d2) for every eligible pair i < j. Rows are dealt to threads
/// round-robin; each thread owns a copy of `proto`.
template <typename Sink>
std::vector<Sink> sweep_pairs(const PointCloud<double>& cloud, int theiler_window, int threads,
                              const Sink& proto) {
  const Eigen::Index n = cloud.size();
  const Eigen::Index d = cloud.dim();
  const Eigen::MatrixXd& pts = cloud.points;  // column-major: coordinates contiguous over points
  const bool ordered = cloud.has_ordering() && theiler_window > 0;
  if (ordered && (cloud.segment.size() != static_cast<std::size_t>(n) ||
                  cloud.time.size() != static_cast<std::size_t>(n)))
    throw std::invalid_argument("point cloud ordering metadata has wrong length");

  const int workers = std::max(1, threads);
  std::vector<Sink> sinks(static_cast<std::size_t>(workers), proto);

  auto work = [&](int t) {
    Sink& sink = sinks[static_cast<std::size_t>(t)];
    std::vector<double> buf(static_cast<std::size_t>(kBlock));
    for (Eigen::Index i = t; i < n; i += workers) {
      for (Eigen::Index j0 = i + 1; j0 < n; j0 += kBlock) {
        const Eigen::Index len = std::min(kBlock, n - j0);
        std::fill_n(buf.begin(), len, 0.0);
        for (Eigen::Index k = 0; k < d; ++k) {
          const double* col = pts.col(k).data() + j0;
          const double pk = pts(i, k);
          double* b = buf.data();
          for (Eigen::Index jj = 0; jj < len; ++jj) {
            const double diff = col[jj] - pk;
            b[jj] += diff * diff;
          }
        }
        if (ordered) {
          const auto si = cloud.segment[static_cast<std::size_t>(i)];
          const auto ti = cloud.time[static_cast<std::size_t>(i)];
          for (Eigen::Index jj = 0; jj < len; ++jj) {
            const auto j = static_cast<std::size_t>(j0 + jj);
            if (cloud.segment[j] == si && std::abs(cloud.time[j] - ti) < theiler_window) continue;
            sink(buf[static_cast<std::size_t>(jj)]);
          }
        } else {
          for (Eigen::Index jj = 0; jj < len; ++jj) sink(buf[static_cast<std::size_t>(jj)]);
        }
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return sinks;
}

struct RadiusSink {
  const std::vector<double>* squared_radii = nullptr;
  std::vector<std::uint64_t> hits;  // hits[k]: pairs whose first admitting radius is k
  std::uint64_t pairs = 0;
  void operator()(double d2) {
    const auto& r2 = *squared_radii;
    const auto idx = static_cast<std::size_t>(std::upper_bound(r2.begin(), r2.end(), d2) - r2.begin());
    ++hits[idx];
    ++pairs;
  }
};

struct HistogramSink {
  std::vector<std::uint64_t> counts;
  std::uint64_t pairs = 0;
  void operator()(double d2) {
    ++counts[PairDistanceHistogram::bin_of(d2)];
    ++pairs;
  }
};

void validate_radii(std::span<const double> radii, const char* what) {
  if (radii.empty()) throw std::invalid_argument(std::string(what) + ": empty radius list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
      throw std::invalid_argument(std::string(what) + ": radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument(std::string(what) + ": radii must be strictly ascending");
  }
}

}  // namespace

ScalingCurve correlation_sum(const PointCloud<double>& cloud, std::span<const double> radii,
                             int theiler_window, int threads) {
  if (cloud.size() < 2) throw std::invalid_argument("correlation_sum: need at least 2 points");
  validate_radii(radii, "correlation_sum");
  std::vector<double> r2(radii.size());
  std::transform(radii.begin(), radii.end(), r2.begin(), [](double r) { return r * r; });

  RadiusSink proto{&r2, std::vector<std::uint64_t>(radii.size() + 1, 0), 0};
  auto sinks = sweep_pairs(cloud, theiler_window, threads, proto);
  std::vector<std::uint64_t> hits(radii.size() + 1, 0);
  std::uint64_t pairs = 0;
  for (const auto& s : sinks) {
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += s.hits[k];
    pairs += s.pairs;
  }
  if (pairs == 0) throw std::invalid_argument("correlation_sum: no eligible pairs");

  ScalingCurve curve;
  curve.method = DimensionMethod::Correlation;
  curve.ambient_dim = cloud.dim();
  curve.radii.assign(radii.begin(), radii.end());
  std::uint64_t running = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    running += hits[k];
    curve.values.push_back(static_cast<double>(running) / static_cast<double>(pairs));
  }
  return curve;
}

ScalingCurve box_count(const PointCloud<double>& cloud, std::span<const double> epsilons) {
  if (cloud.size() < 1) throw std::invalid_argument("box_count: empty point cloud");
  for (double e : epsilons)
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("box_count: epsilons must be positive");
  const Eigen::Index n = cloud.size();
  const Eigen::Index d = cloud.dim();
  const Eigen::RowVectorXd origin = cloud.points.colwise().minCoeff();

  ScalingCurve curve;
  curve.method = DimensionMethod::BoxCounting;
  curve.ambient_dim = d;
  curve.radii.assign(epsilons.begin(), epsilons.end());
  std::vector<std::int64_t> cells(static_cast<std::size_t>(n * d));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (double eps : epsilons) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k)
        cells[static_cast<std::size_t>(i * d + k)] =
            static_cast<std::int64_t>(std::floor((cloud.points(i, k) - origin(k)) / eps));
    auto row = [&](Eigen::Index i) { return cells.begin() + i * d; };
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::lexicographical_compare(row(a), row(a) + d, row(b), row(b) + d);
    });
    std::size_t occupied = n > 0 ? 1 : 0;
    for (std::size_t i = 1; i < order.size(); ++i)
      if (!std::equal(row(order[i - 1]), row(order[i - 1]) + d, row(order[i]))) ++occupied;
    curve.values.push_back(static_cast<double>(occupied));
  }
  return curve;
}

DimensionEstimate fit_dimension(const ScalingCurve& curve, const FitRange& range,
                                const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(curve.size());
  if (curve.values.size() != curve.radii.size())
    throw std::invalid_argument("fit_dimension: radii and values differ in length");
  const double sign = curve.method == DimensionMethod::BoxCounting ? -1.0 : 1.0;
  std::vector<double> lx(static_cast<std::size_t>(n)), ly(static_cast<std::size_t>(n));
  std::vector<bool> valid(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    valid[u] = curve.values[u] > 0.0 && curve.radii[u] > 0.0;
    if (valid[u]) {
      lx[u] = std::log(curve.radii[u]);
      ly[u] = std::log(curve.values[u]);
    }
  }
  auto all_valid = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = a; i <= b; ++i)
      if (!valid[static_cast<std::size_t>(i)]) return false;
    return true;
  };

  Eigen::Index lo = 0, hi = -1;
  switch (range.kind) {
    case FitRange::Kind::Manual:
      lo = range.low;
      hi = range.high;
      if (lo < 0 || hi >= n || hi - lo + 1 < 4 || !all_valid(lo, hi))
        throw std::invalid_argument("fit_dimension: manual range must cover >= 4 valid curve points");
      break;
    case FitRange::Kind::SmallScale: {
      Eigen::Index first = 0;
      while (first < n && !valid[static_cast<std::size_t>(first)]) ++first;
      lo = first;
      hi = first + std::max<Eigen::Index>(options.small_scale_window, 4) - 1;
      if (hi >= n || !all_valid(lo, hi))
        throw EstimationFailed("fit_dimension: not enough small-scale points; use a manual range");
      break;
    }
    case FitRange::Kind::Auto: {
      const auto cut = static_cast<Eigen::Index>(std::floor(options.edge_fraction * static_cast<double>(n)));
      const Eigen::Index first = cut, last = n - 1 - cut;
      const Eigen::Index min_window = std::max<Eigen::Index>(options.min_window, 4);
      std::vector<double> slopes;
      for (Eigen::Index a = first; a <= last; ++a) {
        for (Eigen::Index b = a + min_window - 1; b <= last; ++b) {
          if (!all_valid(a, b)) break;
          if (b - a <= hi - lo) continue;  // cannot beat the current best
          slopes.clear();
          for (Eigen::Index i = a; i < b; ++i) {
            const auto u = static_cast<std::size_t>(i);
            slopes.push_back(sign * (ly[u + 1] - ly[u]) / (lx[u + 1] - lx[u]));
          }
          std::vector<double> sorted = slopes;
          std::sort(sorted.begin(), sorted.end());
          const std::size_t m = sorted.size();
          const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
          const bool stable = std::all_of(slopes.begin(), slopes.end(), [&](double s) {
            return std::abs(s - median) < options.slope_tolerance;
          });
          if (stable) {
            lo = a;
            hi = b;
          }
        }
      }
      if (hi < lo)
        throw EstimationFailed(
            "fit_dimension: no scaling window with stable local slopes; try a manual or "
            "small-scale fit range");
      break;
    }
  }

  // Least squares on the selected window.
  const Eigen::Index count = hi - lo + 1;
  double mx = 0.0, my = 0.0;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    mx += lx[static_cast<std::size_t>(i)];
    my += ly[static_cast<std::size_t>(i)];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    const auto u = static_cast<std::size_t>(i);
    sxx += (lx[u] - mx) * (lx[u] - mx);
    sxy += (lx[u] - mx) * (ly[u] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double r = ly[u] - (intercept + slope * lx[u]);
    ss += r * r;
  }

  DimensionEstimate est;
  est.method = curve.method;
  est.value = std::max(0.0, sign * slope);
  est.fit_range = {lo, hi};
  est.fit_residual = std::sqrt(ss / static_cast<double>(count));
  est.exceeds_ambient =
      curve.ambient_dim > 0 && est.value > static_cast<double>(curve.ambient_dim) + 0.5;
  return est;
}

PairDistanceHistogram::PairDistanceHistogram(const PointCloud<double>& cloud, int theiler_window,
                                             int threads) {
  HistogramSink proto{std::vector<std::uint64_t>(kBinCount, 0), 0};
  auto sinks = sweep_pairs(cloud, theiler_window, threads, proto);
  std::vector<std::uint64_t> counts(kBinCount, 0);
  for (const auto& s : sinks) {
    for (std::size_t b = 0; b < kBinCount; ++b) counts[b] += s.counts[b];
    eligible_ += s.pairs;
  }
  cumulative_.assign(kBinCount + 1, 0);
  for (std::size_t b = 0; b < kBinCount; ++b) cumulative_[b + 1] = cumulative_[b] + counts[b];
}

double PairDistanceHistogram::edge(std::size_t bin) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(bin) << kBinShift);
}

std::size_t PairDistanceHistogram::bin_of(double squared_distance) {
  // Positive doubles order like their bit patterns, so the top bits give a
  // monotone, log-spaced bin index.
  return static_cast<std::size_t>(std::bit_cast<std::uint64_t>(squared_distance) >> kBinShift);
}

std::size_t PairDistanceHistogram::first_edge_with_count(std::uint64_t k) const {
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), k);
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::size_t PairDistanceHistogram::top_edge() const { return first_edge_with_count(eligible_); }

namespace {

std::vector<std::size_t> radius_bins(const PairDistanceHistogram& h, const EstimatorSettings& s) {
  if (s.radii_count < 4) throw std::invalid_argument("estimator: radii_count must be >= 4");
  if (h.eligible_pairs() == 0) throw EstimationFailed("estimator: cloud has no eligible pairs");
  std::uint64_t k = 1;
  if (s.lower_rule == LowerRadiusRule::Percentile) {
    if (!(s.lower_parameter > 0.0 && s.lower_parameter < 1.0))
      throw std::invalid_argument("estimator: percentile must lie in (0,1)");
    k = static_cast<std::uint64_t>(
        std::ceil(s.lower_parameter * static_cast<double>(h.eligible_pairs())));
  } else {
    if (!(s.lower_parameter >= 1.0)) throw std::invalid_argument("estimator: min-pairs must be >= 1");
    k = static_cast<std::uint64_t>(s.lower_parameter);
  }
  k = std::clamp<std::uint64_t>(k, 1, h.eligible_pairs());
  const std::size_t lo_bin = h.first_edge_with_count(k);
  const double r_lo = std::sqrt(PairDistanceHistogram::edge(lo_bin));
  const double r_hi = 0.5 * std::sqrt(PairDistanceHistogram::edge(h.top_edge()));
  if (!(r_lo < r_hi))
    throw EstimationFailed("estimator: lower radius is not below half the diameter");

  std::vector<std::size_t> bins{lo_bin};
  const double a = std::log(r_lo), b = std::log(r_hi);
  for (int i = 1; i < s.radii_count; ++i) {
    const double r = std::exp(a + (b - a) * i / (s.radii_count - 1));
    const std::size_t bin = PairDistanceHistogram::bin_of(r * r);
    if (bin > bins.back()) bins.push_back(bin);
  }
  return bins;
}

double bounding_diagonal(const PointCloud<double>& cloud) {
  return (cloud.points.colwise().maxCoeff() - cloud.points.colwise().minCoeff()).norm();
}

}  // namespace

std::vector<double> default_radii(const PairDistanceHistogram& histogram,
                                  const EstimatorSettings& settings) {
  std::vector<double> out;
  for (auto b : radius_bins(histogram, settings)) out.push_back(std::sqrt(PairDistanceHistogram::edge(b)));
  return out;
}

PointCloud<double> whiten(const PointCloud<double>& cloud) {
  if (cloud.size() < 2) return cloud;
  const Eigen::RowVectorXd mean = cloud.points.colwise().mean();
  const Eigen::MatrixXd centered = cloud.points.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(cloud.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  Eigen::VectorXd inv_sqrt(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    inv_sqrt(i) = (top > 0.0 && ev(i) > 1e-12 * top) ? 1.0 / std::sqrt(ev(i)) : 0.0;
  const Eigen::MatrixXd transform =
      eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  PointCloud<double> out = cloud;
  out.points = centered * transform;
  return out;
}

PointCloud<double> subsample(const PointCloud<double>& cloud, Eigen::Index count, std::uint64_t seed) {
  const Eigen::Index n = cloud.size();
  if (count >= n) return cloud;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng = Rng::stream(seed, Stream::Subsample);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  PointCloud<double> out;
  out.label = cloud.label;
  out.points.resize(count, cloud.dim());
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto src = idx[static_cast<std::size_t>(i)];
    out.points.row(i) = cloud.points.row(src);
    if (cloud.has_ordering()) {
      out.segment.push_back(cloud.segment[static_cast<std::size_t>(src)]);
      out.time.push_back(cloud.time[static_cast<std::size_t>(src)]);
    }
  }
  return out;
}

DimensionEstimate estimate_dimension(const PointCloud<double>& cloud, const EstimatorSettings& settings,
                                     ScalingCurve* curve_out) {
  DimensionEstimate degenerate;
  degenerate.method = settings.method;
  if (cloud.size() < 2 || bounding_diagonal(cloud) <= settings.degenerate_diameter) {
    if (curve_out) *curve_out = ScalingCurve{{}, {}, settings.method, cloud.dim()};
    return degenerate;
  }
  PointCloud<double> work =
      cloud.size() > settings.max_points ? subsample(cloud, settings.max_points, settings.seed) : cloud;
  if (settings.standardize == Standardize::Whiten) work = whiten(work);

  ScalingCurve curve;
  if (settings.method == DimensionMethod::Correlation) {
    const PairDistanceHistogram hist(work, settings.theiler_window, settings.threads);
    const auto bins = radius_bins(hist, settings);
    curve.method = DimensionMethod::Correlation;
    curve.ambient_dim = work.dim();
    for (auto b : bins) {
      curve.radii.push_back(std::sqrt(PairDistanceHistogram::edge(b)));
      curve.values.push_back(static_cast<double>(hist.count_below_edge(b)) /
                             static_cast<double>(hist.eligible_pairs()));
    }
  } else {
    // Scale bounds come from a 1000-point subsample; the counts use every point.
    const PointCloud<double> probe = subsample(work, 1000, settings.seed + 1);
    const PairDistanceHistogram hist(probe, settings.theiler_window, settings.threads);
    curve = box_count(work, default_radii(hist, settings));
  }
  if (curve_out) *curve_out = curve;
  return fit_dimension(curve, settings.range, settings.fit);
}

}  // namespace rcdim
