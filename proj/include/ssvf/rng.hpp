#pragma once
// Deterministic random utilities. Campaign reproducibility requires draw
// sequences that depend only on (seed, stream, index), never on worker
// count or platform library internals, so distributions are hand-rolled
// on top of xoshiro256** with splitmix64 seeding.

#include <array>
#include <cmath>
#include <cstdint>

namespace ssvf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  // Child generator for an independent named stream. Streams drawn per run
  // must derive from (seed, stream, index) only: that is what makes shard
  // merges order-insensitive.
  static Rng derive(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t index = 0) {
    std::uint64_t s = seed;
    s ^= splitmix64(stream) + 0x9e3779b97f4a7c15ULL;
    std::uint64_t t = stream ^ (index * 0xd1b54a32d192ed03ULL);
    s ^= splitmix64(t);
    return Rng(s ^ (index + 0x2545f4914f6cdd1dULL));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased draw in [0, bound) via rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double exponential(double mean) {
    double u = uniform01();
    // log(0) guard; uniform01 can return exactly 0.
    if (u <= 0.0) u = 0x1.0p-53;
    return -mean * std::log(u);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace ssvf
