#pragma once

#include <cmath>
#include <cstdint>

namespace isomed {

/// SplitMix64 finalizer.
inline std::uint64_t mix_bits(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed for (stream, counter) under a base seed. Any
/// replicate's generator can be reconstructed without touching the others,
/// so serial and parallel runs draw identical streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t counter) {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  const std::uint64_t h = mix_bits(base + golden * (stream + 1));
  return mix_bits(h + golden * (counter + 1));
}

/// Small deterministic generator (SplitMix64) with the normal, gamma and
/// chi-square draws the simulations need. One instance per replicate; the
/// output sequence depends only on the seed, never on the platform's
/// library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix_bits(state_);
  }

  /// Uniform on (0, 1].
  double next_uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi_ * u2);
  }

  /// Gamma(shape, 1) by the Marsaglia-Tsang squeeze.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double u = next_uniform();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_chi_square(long nu) { return 2.0 * next_gamma(0.5 * static_cast<double>(nu)); }

 private:
  static constexpr double two_pi_ = 6.283185307179586476925286766559;
  std::uint64_t state_;
};

}  // namespace isomed
