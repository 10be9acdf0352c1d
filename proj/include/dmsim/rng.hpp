#pragma once

#include <cstdint>

namespace dmsim {

// Deterministic, platform-independent random streams. Every entity gets its
// own stream derived from (run seed, entity kind, entity id), so editing one
// part of a scenario never perturbs the draws of unrelated entities.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum class StreamKind : std::uint64_t {
  sensor_false_report = 1,
  map_waypoint = 2,
};

class EntityRng {
 public:
  EntityRng() = default;
  EntityRng(std::uint64_t run_seed, StreamKind kind, std::uint64_t entity_id) {
    // Mix the three components through separate splitmix steps.
    std::uint64_t s = run_seed;
    splitmix64(s);
    s ^= 0x6a09e667f3bcc908ull * static_cast<std::uint64_t>(kind);
    splitmix64(s);
    s ^= 0xbb67ae8584caa73bull * (entity_id + 1);
    state_ = s;
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_u01() < p; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace dmsim
