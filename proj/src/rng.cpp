#include "fibersec/rng.hpp"

namespace fibersec {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Seed derive_seed(Seed base, std::uint64_t a) { return mix64(base ^ mix64(a)); }

Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b) {
  return mix64(derive_seed(base, a) ^ mix64(b));
}

Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(derive_seed(base, a, b) ^ mix64(c));
}

}  // namespace fibersec
