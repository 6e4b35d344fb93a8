#pragma once
// =============================================================================
// Privacy primitives: Laplace noise, the discretized nonnegative
// Laplace-rounded count distribution used for randomized budgets ("lap-plus"),
// its exact inverse-CDF sampler, and closed-form likelihood-ratio audits of
// the two mechanisms the adaptive designs rely on.
//
// lap-plus pmf over outputs floor(m) + k, k >= -floor(m):
//   P(k) = e^{-(eps/2)|k|} * (e^{eps/2} - 1) / (e^{eps/2} + 1 - e^{-(eps/2) floor(m)})
// which sums to exactly 1 on its support.
// =============================================================================

#include <span>
#include <vector>

#include "conselab/rng.hpp"

namespace conselab {

// Mean-zero Laplace with the given scale; consumes exactly one uniform draw.
double laplace_sample(double scale, Rng& rng);

// Probability that the lap-plus mechanism at location m and privacy eps
// outputs floor(m) + k.  Rejects k below the support (output would be
// negative), eps <= 0, and m < 0.
double lap_plus_pmf(double m, double epsilon, long k);

// Exact inverse-CDF draw from the lap-plus distribution; returns the
// (nonnegative) output value floor(m) + k.  Consumes one uniform draw.
long lap_plus_sample(double m, double epsilon, Rng& rng);

struct PmfAuditRow {
  double m = 0.0;
  double epsilon = 0.0;
  double total_mass = 0.0;  // sum over the support until the analytic tail < 1e-15
  double abs_error = 0.0;   // |total_mass - 1|
  bool pass = false;        // abs_error < 1e-9
};

// Normalization audit of the lap-plus pmf over a parameter grid.
std::vector<PmfAuditRow> pmf_normalization_audit(std::span<const double> ms,
                                                 std::span<const double> epsilons);

enum class RatioMechanism {
  kLaplaceMean,   // release mean of R bounded rewards + Lap(2/(eps R))
  kLapPlusShift,  // release lap-plus(m) vs lap-plus(m +- 1)
};

struct RatioAuditParams {
  double epsilon = 1.0;
  long R = 100;     // batch length (laplace-mean)
  double m = 100.0;  // location (lap-plus-shift)
};

struct RatioAuditRow {
  RatioMechanism mechanism;
  RatioAuditParams params;
  double max_log_ratio = 0.0;  // sup over outputs of |log p - log p'|
  double bound = 0.0;          // eps/2 for laplace-mean, eps for lap-plus-shift
  bool pass = false;
};

// Worst-case log-likelihood-ratio scan between neighbouring inputs.
RatioAuditRow mechanism_ratio_audit(RatioMechanism mechanism, const RatioAuditParams& params);

}  // namespace conselab
