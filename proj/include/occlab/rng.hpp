#pragma once

// Counter-seeded random streams. Every replica of an experiment owns its own
// stream keyed by (master_seed, replica_index), so results do not depend on
// how replicas are scheduled across threads. The generator and the Gaussian
// sampler are fully specified here rather than taken from <random>, because
// the standard leaves distribution algorithms unspecified and we promise
// byte-identical output for identical (config, seed).

#include <cstdint>
#include <cmath>

namespace occlab {

struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// xoshiro256++ (Blackman & Vigna), state filled from splitmix64 over a hash
// of the stream key.
class Rng {
 public:
  explicit Rng(RngStreamSpec spec) {
    std::uint64_t a = spec.master_seed;
    std::uint64_t h = detail::splitmix64(a);
    std::uint64_t b = spec.replica_index ^ 0x632be59bd9b4e019ULL;
    std::uint64_t g = detail::splitmix64(b);
    std::uint64_t x = h ^ (g + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    bool nonzero = false;
    for (auto& w : state_) {
      w = detail::splitmix64(x);
      nonzero |= (w != 0);
    }
    if (!nonzero) state_[0] = 1;
  }

  Rng(std::uint64_t master_seed, std::uint64_t replica_index)
      : Rng(RngStreamSpec{master_seed, replica_index}) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe as a log/denominator argument.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // N(0,1) via the Marsaglia polar method; caches the spare deviate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential() { return -std::log(uniform_open()); }

  // Uniform integer in [0, bound) by rejection from the top of the range.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives a child master seed for a named sub-experiment, so the phases of a
// composite experiment consume independent streams.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  std::uint64_t x = master_seed ^ (0xd1b54a32d192ed03ULL * (tag + 1));
  return detail::splitmix64(x);
}

}  // namespace occlab
