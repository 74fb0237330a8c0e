#pragma once

#include <Eigen/Core>
#include <random>

namespace altmin {

/// Seeded generator used everywhere randomness is needed. One instance per
/// run; traces are bit-reproducible for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * unit_(gen_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)) + lo;
  }

  /// Uniform direction on the unit sphere in R^n.
  Eigen::VectorXd unit_direction(Eigen::Index n) {
    Eigen::VectorXd d(n);
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) d[i] = normal_(gen_);
      norm = d.norm();
    } while (norm < 1e-12);
    return d / norm;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace altmin
