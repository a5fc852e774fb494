#pragma once

#include <cstdint>

namespace sciforge {

// Splitmix64-based generator. std:: distributions are not bit-stable across
// standard libraries, and dataset generation must be byte-deterministic, so
// all randomness in the library goes through this.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n), n > 0.
  uint64_t uniform(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(uniform(static_cast<uint64_t>(hi - lo) + 1));
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool coin() { return (next() & 1) != 0; }

  // Stable per-figure seed derivation: reseeding one figure never shifts
  // the others.
  static uint64_t derive(uint64_t master, uint64_t index) {
    Rng r(master ^ (index * 0xd1b54a32d192ed03ull) ^ 0x2545f4914f6cdd1dull);
    return r.next();
  }

 private:
  uint64_t state_;
};

}  // namespace sciforge
