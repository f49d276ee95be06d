#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "negmix/complex_util.hpp"

namespace negmix {

/// Derive a child seed from (seed, tag). Children are fully determined by
/// their tags, so components, restarts and experiment repetitions can draw
/// from independent streams in any evaluation order.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t x = seed ^ (tag + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  x += 0x9e3779b97f4a7c15ULL;  // splitmix64 finalizer
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. Uniform and Gaussian draws are implemented on top
/// of the raw mt19937_64 output (not std distributions), so sequences are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(split_seed(seed, 0)) {}

  Rng child(std::uint64_t tag) const { return Rng(split_seed(seed_, tag)); }
  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard Gaussian via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  /// Independent standard-Gaussian real and imaginary parts.
  Eigen::VectorXcd complex_gaussian_vector(int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
      double re = gaussian();
      double im = gaussian();
      v[i] = Complex(re, im);
    }
    return v;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace negmix
