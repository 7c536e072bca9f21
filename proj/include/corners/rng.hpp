#pragma once

#include <cstdint>
#include <string>

#include "corners/rational.hpp"

namespace corners {

/** Seeded, splittable generator (splitmix64 core).
 *
 * Every stochastic report in this library embeds the root seed it was run
 * with; identical seeds reproduce identical runs bit for bit, including
 * across split children.
 */
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /** Child generator derived from the current state and a label; does not
   * advance this generator. */
  Rng split(uint64_t label) const {
    uint64_t z = state_ ^ (0x632be59bd9b4e019ull * (label + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z);
  }

  Rng split(const std::string& name) const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : name) {
      h ^= (unsigned char)c;
      h *= 1099511628211ull;
    }
    return split(h);
  }

  /** Uniform double in [0, 1). */
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next_u64() % uint64_t(hi - lo + 1));
  }

  /** Uniform dyadic rational k/2^bits with k in [-2^bits, 2^bits]. */
  Rational rational_pm1(int bits = 16) {
    long long span = 1ll << bits;
    long long k = (long long)(next_u64() % (uint64_t)(2 * span + 1)) - span;
    return Rational(k, span);
  }

  /** Uniform dyadic rational in [0, 1]. */
  Rational rational_01(int bits = 16) {
    long long span = 1ll << bits;
    long long k = (long long)(next_u64() % (uint64_t)(span + 1));
    return Rational(k, span);
  }

 private:
  uint64_t state_;
};

}  // namespace corners
