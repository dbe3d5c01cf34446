#pragma once

#include <cstdint>
#include <random>

namespace curex {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Address in a tree of independent random streams. A key is derived from a
// seed, and child(i) derives the key for the i-th subtree, so that
// (seed, grid point, replication, resample) paths map to unrelated streams.
struct RngKey {
  std::uint64_t state = 0;

  static RngKey from_seed(std::uint64_t seed) { return RngKey{detail::mix64(seed)}; }

  RngKey child(std::uint64_t index) const {
    return RngKey{detail::mix64(state ^ (0xA24BAED4963EE407ULL * (index + 1)))};
  }
};

// One deterministic uniform stream for a given key.
class RngStream {
 public:
  explicit RngStream(RngKey key) : engine_(key.state) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound) { return next() % bound; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace curex
