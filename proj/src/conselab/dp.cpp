#include "conselab/dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conselab {
namespace {

[[noreturn]] void fail(const char* what) { throw std::invalid_argument(what); }

// pmf(k) = e^{-c|k|} (e^c - 1) / (e^c + 1 - e^{-c floor_m}) on k >= -floor_m.
// Stored in the equivalent form (1 - e^{-c}) / (1 + e^{-c} - e^{-c(floor_m+1)})
// which stays finite for arbitrarily large privacy budgets (c = eps/2 can
// exceed the overflow threshold of e^c).
struct LapPlusDist {
  double c = 0.0;
  long floor_m = 0;
  double z = 0.0;     // 1 + e^{-c} - e^{-c (floor_m + 1)}
  double coef = 0.0;  // (1 - e^{-c}) / z

  static LapPlusDist make(double m, double epsilon) {
    if (!(epsilon > 0.0)) fail("lap_plus.epsilon: must be positive");
    if (m < 0.0) fail("lap_plus.m: must be nonnegative");
    LapPlusDist dist;
    dist.c = epsilon / 2.0;
    dist.floor_m = static_cast<long>(std::floor(m));
    dist.z = 1.0 + std::exp(-dist.c) - std::exp(-dist.c * static_cast<double>(dist.floor_m + 1));
    dist.coef = -std::expm1(-dist.c) / dist.z;
    return dist;
  }

  double pmf(long k) const { return coef * std::exp(-c * static_cast<double>(std::labs(k))); }

  double log_pmf(long k) const {
    return std::log(coef) - c * static_cast<double>(std::labs(k));
  }

  // Closed-form CDF over the offset k.
  double cdf(long k) const {
    if (k < -floor_m) return 0.0;
    if (k < 0)
      return (std::exp(c * static_cast<double>(k)) -
              std::exp(-c * static_cast<double>(floor_m + 1))) /
             z;
    return 1.0 - std::exp(-c * static_cast<double>(k + 1)) / z;
  }
};

}  // namespace

double laplace_sample(double scale, Rng& rng) {
  if (!(scale > 0.0)) fail("laplace_sample.scale: must be positive");
  const double u = rng.uniform();
  if (u < 0.5) return scale * std::log(std::max(2.0 * u, 0x1.0p-53));
  return -scale * std::log(std::max(2.0 * (1.0 - u), 0x1.0p-53));
}

double lap_plus_pmf(double m, double epsilon, long k) {
  const LapPlusDist dist = LapPlusDist::make(m, epsilon);
  if (k < -dist.floor_m) fail("lap_plus_pmf.k: below the support (output would be negative)");
  return dist.pmf(k);
}

long lap_plus_sample(double m, double epsilon, Rng& rng) {
  if (!(m > 0.0)) fail("lap_plus_sample.m: must be positive");
  const LapPlusDist dist = LapPlusDist::make(m, epsilon);
  const double u = rng.uniform();

  // Invert the closed-form CDF, then nudge to the exact quantile to absorb
  // floating-point edge effects.
  const double negative_mass = dist.cdf(-1);
  long k;
  if (u < negative_mass) {
    const double target = u * dist.z + std::exp(-dist.c * static_cast<double>(dist.floor_m + 1));
    k = static_cast<long>(std::ceil(std::log(target) / dist.c));
    k = std::clamp<long>(k, -dist.floor_m, -1);
  } else {
    const double tail = std::max((1.0 - u) * dist.z, 0x1.0p-80);
    k = static_cast<long>(std::ceil(-std::log(tail) / dist.c - 1.0));
    k = std::max<long>(k, 0);
  }
  while (k > -dist.floor_m && dist.cdf(k - 1) >= u) --k;
  while (dist.cdf(k) < u) ++k;
  return dist.floor_m + k;
}

std::vector<PmfAuditRow> pmf_normalization_audit(std::span<const double> ms,
                                                 std::span<const double> epsilons) {
  std::vector<PmfAuditRow> rows;
  rows.reserve(ms.size() * epsilons.size());
  for (const double m : ms) {
    for (const double eps : epsilons) {
      const LapPlusDist dist = LapPlusDist::make(m, eps);
      PmfAuditRow row;
      row.m = m;
      row.epsilon = eps;
      double total = 0.0;
      for (long k = -dist.floor_m;; ++k) {
        total += dist.pmf(k);
        if (k >= 0) {
          // Remaining analytic tail past k: sum of the geometric upper arm.
          const double tail =
              std::exp(-dist.c * static_cast<double>(k + 1)) / dist.z;
          if (tail < 1e-15) break;
        }
      }
      row.total_mass = total;
      row.abs_error = std::abs(total - 1.0);
      row.pass = row.abs_error < 1e-9;
      rows.push_back(row);
    }
  }
  return rows;
}

RatioAuditRow mechanism_ratio_audit(RatioMechanism mechanism, const RatioAuditParams& params) {
  if (!(params.epsilon > 0.0)) fail("mechanism_ratio_audit.epsilon: must be positive");
  RatioAuditRow row;
  row.mechanism = mechanism;
  row.params = params;

  switch (mechanism) {
    case RatioMechanism::kLaplaceMean: {
      if (params.R < 1) fail("mechanism_ratio_audit.R: must be >= 1");
      // Mean of R rewards in [0,1] + Lap(2/(eps R)); one reward changing moves
      // the mean by at most 1/R.  The density log-ratio |(|z-s| - |z|)| / b
      // plateaus at s/b = eps/2 for z beyond the shift, so a scan that
      // reaches past the shift attains the supremum exactly.
      const double scale = 2.0 / (params.epsilon * static_cast<double>(params.R));
      const double shift = 1.0 / static_cast<double>(params.R);
      double worst = 0.0;
      const int points = 20001;
      for (int i = 0; i < points; ++i) {
        const double zval = -4.0 * shift + 9.0 * shift * i / (points - 1);
        worst = std::max(worst, std::abs(std::abs(zval - shift) - std::abs(zval)) / scale);
      }
      row.max_log_ratio = worst;
      row.bound = params.epsilon / 2.0;
      row.pass = row.max_log_ratio <= row.bound + 1e-9;
      return row;
    }
    case RatioMechanism::kLapPlusShift: {
      if (!(params.m > 0.0)) fail("mechanism_ratio_audit.m: must be positive");
      // Outputs of both locations live on the nonnegative integers; the
      // log-pmf is piecewise linear in the output with breakpoints at the two
      // floors, so scanning a few values past both covers the constant tails.
      const LapPlusDist base = LapPlusDist::make(params.m, params.epsilon);
      const LapPlusDist shifted = LapPlusDist::make(params.m + 1.0, params.epsilon);
      double worst = 0.0;
      const long v_max = std::max(base.floor_m, shifted.floor_m) + 5;
      for (long v = 0; v <= v_max; ++v) {
        const double lp_base = base.log_pmf(v - base.floor_m);
        const double lp_shift = shifted.log_pmf(v - shifted.floor_m);
        worst = std::max(worst, std::abs(lp_base - lp_shift));
      }
      row.max_log_ratio = worst;
      row.bound = params.epsilon;
      row.pass = row.max_log_ratio <= row.bound + 1e-12;
      return row;
    }
  }
  fail("mechanism_ratio_audit.mechanism: unknown mechanism");
}

}  // namespace conselab
