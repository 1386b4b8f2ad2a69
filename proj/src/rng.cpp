#include "steinbounds/rng.hpp"

#include <cmath>

#include "steinbounds/errors.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

counter_rng::counter_rng(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t substream) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ (0xa076'1d64'78bd'642fULL + stream));
  k = mix64(k ^ (0xe703'7ed1'a0b4'28dbULL + substream));
  key_ = k;
}

std::uint64_t counter_rng::next_u64() { return mix64(key_ ^ mix64(counter_++)); }

double counter_rng::uniform01() {
  // 53 random bits into (0,1); offset by half an ulp so 0 is excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double counter_rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

bool counter_rng::bernoulli(double p) { return uniform01() < p; }

long counter_rng::poisson(double mean) {
  if (mean < 0) throw domain_error("poisson sampler: negative mean");
  if (mean == 0) return 0;
  // CDF inversion; adequate for the moderate means used in this project.
  const double u = uniform01();
  double term = std::exp(-mean);
  double cum = term;
  long k = 0;
  while (u > cum && k < 100000) {
    ++k;
    term *= mean / static_cast<double>(k);
    cum += term;
  }
  return k;
}

double counter_rng::exponential(double rate) {
  if (rate <= 0) throw domain_error("exponential sampler: rate must be positive");
  return -std::log(uniform01()) / rate;
}

double counter_rng::normal01() { return std_normal_quantile(uniform01()); }

long counter_rng::uniform_int(long lo, long hi) {
  if (hi < lo) throw domain_error("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection to kill modulo bias.
  const std::uint64_t limit = span * (UINT64_MAX / span);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return lo + static_cast<long>(v % span);
}

}  // namespace steinbounds
