#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "pdsage/types.hpp"

namespace pdsage {

/// Seedable generator with a fixed, platform-independent output sequence.
///
/// Raw bits come from std::mt19937_64, whose sequence is fixed by the C++
/// standard. Uniform doubles take the top 53 bits; normals use the
/// Box-Muller transform. std::*_distribution is avoided because its output
/// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  /// Standard normal.
  double normal();
  /// CN(0, variance): real and imaginary parts each N(0, variance / 2).
  cd complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a base seed with stream identifiers (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace pdsage
