#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace sil {

// Seeded sampler on top of mt19937_64. The bit-to-double mapping and the
// gamma/normal algorithms are spelled out here rather than taken from
// <random> distributions, whose output is implementation-defined; identical
// seeds must give identical samples on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_pos() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; two draws per call, no cached spare.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Marsaglia-Tsang; boosted to alpha+1 for alpha < 1.
  double gamma(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("gamma: alpha must be > 0");
    if (alpha < 1.0)
      return gamma(alpha + 1.0) * std::pow(uniform_pos(), 1.0 / alpha);
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double v, double w) {
    const double g1 = gamma(v);
    const double g2 = gamma(w);
    return g1 / (g1 + g2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sil
