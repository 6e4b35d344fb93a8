#pragma once
// =============================================================================
// Dyadic-style axis-aligned partitions of [0,1]^d used for localization.
// A grid at tuning exponent `alpha_exponent` uses
//   per_dim = floor(n^((1 - alpha_exponent) / (2*beta + d)))
// bins per axis (clamped to >= 1); indices are row-major with axis 0
// fastest-varying, and the closed upper boundary x_i = 1 maps into the last
// bin so the cells partition the cube exactly.
// =============================================================================

#include <span>
#include <vector>

#include "conselab/env.hpp"

namespace conselab {

struct Grid {
  int d = 1;
  long per_dim = 1;
  long total = 1;
};

// floor(base^exponent) with a tiny additive nudge so exact-power boundaries
// (e.g. (10^6)^(1/3) = 100) do not round down spuriously.
long floor_power(double base, double exponent);

// Throws std::invalid_argument naming the offending parameter.
Grid make_grid(long n, int d, double beta, double alpha_exponent);

// Row-major cell index of x (axis 0 fastest-varying).  Coordinates are
// clamped to [0,1] first, so x_i = 1 lands in the last bin.
long bin_index(const Grid& grid, std::span<const double> x);

// Center of cell j.
std::vector<double> bin_center(const Grid& grid, long j);

// Probability that a covariate drawn from `spec` lands in cell j.  The
// supported covariate law is uniform, for which this is exactly 1/total.
double bin_probability(const Grid& grid, const EnvironmentSpec& spec, long j);

}  // namespace conselab
