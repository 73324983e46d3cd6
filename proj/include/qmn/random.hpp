#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace qmn {

/// Deterministic 64-bit generator (splitmix64 update).
///
/// Every seeded routine in the library draws through this class instead of
/// the standard <random> distributions, whose output is implementation
/// defined.  Two runs with the same seed therefore produce identical draws
/// byte for byte, which the command line tool relies on.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer draw in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Standard exponential via inversion; strictly positive.
  double exponential() {
    double u = uniform01();
    return -std::log1p(-u);
  }

  /// Uniform weights on the simplex (normalized exponentials).  Fills
  /// `out` with n nonnegative entries summing to one.  Consumes exactly n
  /// draws, so sample k of a sequence depends only on the seed and k.
  void simplex_weights(std::size_t n, std::vector<double>& out) {
    out.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = exponential() + 1e-300;
      total += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= total;
  }

 private:
  std::uint64_t state_;
};

/// Stable combination of two seeds for independent substreams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (0x632be59bd9b4e019ull + (b << 1)));
  g.next();
  return g.next() ^ b;
}

}  // namespace qmn
