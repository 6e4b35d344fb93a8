#pragma once
// =============================================================================
// Evaluation functionals: instantaneous pseudo-regret against the pointwise
// oracle, mean integrated squared error of piecewise-constant effect
// estimates, and the simple regret of a learned bin-to-arm policy.
//
// Quadrature: in one dimension each bin is integrated with 256 midpoints; in
// higher dimensions a fixed 4096-point Halton set over the whole cube is
// used.  Both rules are deterministic.
// =============================================================================

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "conselab/binning.hpp"
#include "conselab/env.hpp"

namespace conselab {

// Piecewise-constant treatment-effect estimate on a grid.  A degenerate flag
// marks cells whose estimate came from an empty or near-empty randomized
// window (the value is still defined).
struct CateEstimate {
  Grid grid;
  std::vector<double> values;
  std::vector<uint8_t> degenerate_flags;
};

struct RunMetrics {
  double cumulative_regret = 0.0;
  std::optional<std::vector<double>> regret_curve;  // per-step partial sums
  double mise = 0.0;
  double simple_regret = 0.0;
  double wallclock_ms = 0.0;
};

// Assignment of one arm per grid cell.
struct BinPolicy {
  Grid grid;
  std::vector<int8_t> arms;
};

// max(f0(x), f1(x)) - f_arm(x); never negative.
double instantaneous_regret(const EnvironmentSpec& spec, std::span<const double> x, int arm);

// Integral over [0,1]^d of (estimate(x) - cate(x))^2 under the default
// quadrature resolution.
double mise(const CateEstimate& estimate, const EnvironmentSpec& spec);

// Same functional with an explicit resolution (points per bin in d = 1,
// total points for d >= 2); exposed so convergence of the rule is testable.
double mise_with_resolution(const CateEstimate& estimate, const EnvironmentSpec& spec,
                            long resolution);

// Integral of max(f0, f1) - f_{policy(x)}: the per-decision shortfall of the
// learned policy, under the same quadrature.
double simple_regret(const BinPolicy& policy, const EnvironmentSpec& spec);
double simple_regret_with_resolution(const BinPolicy& policy, const EnvironmentSpec& spec,
                                     long resolution);

// Treatment effect at the center of cell j.
double bin_gap(const EnvironmentSpec& spec, const Grid& grid, long j);

}  // namespace conselab
