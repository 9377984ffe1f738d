#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

namespace rcdim {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream identifiers for the counter-based seed scheme. A stream seed is
/// splitmix64-folded over (master, purpose, index...), so results never depend
/// on the order in which streams are consumed.
enum class Stream : std::uint64_t {
  Reservoir = 1,
  Block = 2,
  InitialCondition = 3,
  Perturbation = 4,
  JacobianSamples = 5,
  Subsample = 6,
  Generic = 7,
};

/// Portable uniform generator: std::mt19937_64 (output sequence fixed by the
/// standard) with the 53-bit mantissa conversion done by hand, since
/// std::uniform_real_distribution differs between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives a stream from a master seed and a path of indices.
  static Rng stream(std::uint64_t master, Stream purpose,
                    std::initializer_list<std::uint64_t> path = {}) {
    std::uint64_t s = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(purpose)));
    for (auto k : path) s = splitmix64(s ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> uniform_matrix(Eigen::Index rows,
                                                                        Eigen::Index cols,
                                                                        double lo, double hi) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    // Row-major fill order is part of the reproducibility contract.
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(uniform(lo, hi));
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcdim
