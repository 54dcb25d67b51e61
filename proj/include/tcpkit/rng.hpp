// Seeded pseudo-random numbers with a fixed, documented bit stream so reports
// are reproducible across platforms and standard libraries.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tcpkit {

/// SplitMix64 (Steele, Lea, Flood 2014). Increment 0x9E3779B97F4A7C15,
/// mixing multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw per call, the sine branch is discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Exponential(1), used for Dirichlet(1, ..., 1) weights.
  double exponential() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(Eigen::Index n) {
    Eigen::VectorXd v = normal_vector(n);
    double norm = v.norm();
    while (norm == 0.0) {
      v = normal_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

  /// Uniform on the probability simplex of dimension k.
  Eigen::VectorXd dirichlet(Eigen::Index k) {
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) w[i] = exponential();
    return w / w.sum();
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed for sub-task `index` of a seeded job.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return g.next();
}

}  // namespace tcpkit
