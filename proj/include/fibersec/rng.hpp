#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fibersec {

/// Explicit 64-bit seed. Same seed + same parameters gives bit-identical
/// random output everywhere in the library; there is no global RNG state.
using Seed = std::uint64_t;

/// splitmix64 finalizer. Used to derive independent sub-stream seeds from a
/// base seed and integer coordinates (channel, noise index, trial index, ...)
/// so that parallel and serial execution produce identical results.
std::uint64_t mix64(std::uint64_t z);

Seed derive_seed(Seed base, std::uint64_t a);
Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b);
Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Pinned random source: std::mt19937_64 for the raw stream, uniforms taken
/// as 53-bit doubles in (0,1], normals via Box-Muller. A reimplementation
/// that adopts the same generator and the same transforms reproduces the
/// streams exactly.
class Rng {
 public:
  explicit Rng(Seed seed) : gen_(seed) {}

  /// Uniform double in (0, 1], 53-bit resolution.
  double uniform() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal N(0,1) via Box-Muller (cosine branch); consumes two
  /// uniforms per value.
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Complex normal with independent N(0,1) real and imaginary parts,
  /// from one Box-Muller pair.
  std::complex<double> complex_gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fibersec
