#pragma once

#include <cstdint>

namespace steinbounds {

// SplitMix64 finalizer. Used both as a hash for deriving sub-streams and as
// the output function of the counter generator below.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output is a pure function of (key, counter), where
// the key is derived by hashing (seed, stream, substream). Replicate r and
// component k of a simulation each get their own stream, so results do not
// depend on scheduling or worker count.
class counter_rng {
 public:
  explicit counter_rng(std::uint64_t seed, std::uint64_t stream = 0,
                       std::uint64_t substream = 0);

  std::uint64_t next_u64();

  // Uniform on (0,1), never returning the endpoints.
  double uniform01();
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  // Inversion sampler; intended for the small means used throughout.
  long poisson(double mean);
  double exponential(double rate);
  // Standard normal via inverse-CDF (one variate per counter tick).
  double normal01();
  long uniform_int(long lo, long hi);  // inclusive bounds

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace steinbounds
