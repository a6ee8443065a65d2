#pragma once

// Seeded deterministic sampling. Draws are built from raw mt19937_64 output
// so streams are identical across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>

#include "mab/linalg.hpp"

namespace mab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec point_in_box(const Vec& lo, const Vec& hi) {
    Vec p(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) p[i] = uniform(lo[i], hi[i]);
    return p;
  }

  /// Uniform direction on the unit sphere in R^n.
  Vec direction(std::size_t n) {
    Vec u(n);
    double s = 0.0;
    do {
      for (auto& x : u) x = normal();
      s = norm(u);
    } while (s < 1e-12);
    for (auto& x : u) x /= s;
    return u;
  }

  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mab
