#pragma once
// =============================================================================
// Deterministic random streams.
//
// Every simulation consumes exactly one xoshiro256++ stream, seeded through
// splitmix64 so that nearby (base_seed, cell, replication) triples give
// decorrelated streams.  All samplers below consume a fixed number of uniform
// draws per call, which makes whole runs reproducible byte-for-byte across
// platforms and thread counts.
// =============================================================================

#include <cstdint>
#include <cmath>

namespace conselab {

// splitmix64 finalizer; also used on its own as a cheap 64-bit mixer.
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stream seed for replication `rep` of sweep cell `cell`.  Each coordinate is
// mixed before combining so that consecutive cells/reps do not produce
// correlated xoshiro states.
inline uint64_t derive_seed(uint64_t base_seed, uint64_t cell, uint64_t rep) {
  uint64_t s = mix64(base_seed);
  s = mix64(s ^ mix64(cell ^ 0x6A09E667F3BCC909ull));
  s = mix64(s ^ mix64(rep ^ 0xBB67AE8584CAA73Bull));
  return s;
}

// xoshiro256++ (Blackman & Vigna).  State expanded from a 64-bit seed via
// splitmix64, per the reference recommendation.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ull;
      uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      word = z ^ (z >> 31);
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits; consumes one 64-bit draw.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Consumes exactly one draw.
  bool bernoulli(double p) { return uniform() < p; }

  // Integer uniform on [0, bound) by rejection-free scaling; one draw.  Used
  // only for shuffles, where the negligible modulo bias of 128-bit scaling is
  // irrelevant (and this variant is exact anyway).
  uint64_t below(uint64_t bound) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * bound) >> 64);
  }

  // Standard normal via inverse CDF; consumes exactly one draw.
  double normal01();

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t state_[4];
};

// Acklam's rational approximation to the standard normal quantile
// (|relative error| < 1.2e-9), adequate for bounded-noise reward draws.
inline double inverse_normal_cdf(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  static constexpr double p_low = 0.02425;

  if (p <= 0.0) return -38.0;  // clamp; callers never pass exact 0/1 anyway
  if (p >= 1.0) return 38.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double Rng::normal01() { return inverse_normal_cdf(uniform()); }

}  // namespace conselab
