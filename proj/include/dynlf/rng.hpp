#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dynlf {

/// Deterministic random source. mt19937_64's raw stream is pinned by the
/// standard; the distribution transforms live here because the standard
/// library's distributions are implementation-defined, which would break the
/// bitwise reproducibility contracts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform on [0,1), 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1].
  double unit_open_low() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform on (0, 0.1], the factor initialization range.
  double factor_init() { return 0.1 * unit_open_low(); }

  /// N(0, sigma^2) via Box-Muller; always consumes two raw draws.
  double normal(double sigma) {
    const double u1 = unit_open_low();
    const double u2 = unit();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return unit() < p; }

  /// Uniform integer in [0, n); multiply-shift bounded draw.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dynlf
