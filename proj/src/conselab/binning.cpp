#include "conselab/binning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace conselab {

long floor_power(double base, double exponent) {
  return static_cast<long>(std::floor(std::pow(base, exponent) + 1e-9));
}

Grid make_grid(long n, int d, double beta, double alpha_exponent) {
  if (n < 2) throw std::invalid_argument("make_grid.n: must be >= 2");
  if (d < 1) throw std::invalid_argument("make_grid.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("make_grid.beta: must lie in (0, 1]");
  if (!(alpha_exponent >= 0.0) || alpha_exponent > 1.0)
    throw std::invalid_argument("make_grid.alpha_exponent: must lie in [0, 1]");

  Grid grid;
  grid.d = d;
  grid.per_dim = std::max<long>(
      1, floor_power(static_cast<double>(n), (1.0 - alpha_exponent) / (2.0 * beta + d)));
  grid.total = 1;
  for (int i = 0; i < d; ++i) {
    if (grid.total > (1L << 40) / grid.per_dim)
      throw std::invalid_argument("make_grid: total bin count overflows the supported range");
    grid.total *= grid.per_dim;
  }
  return grid;
}

long bin_index(const Grid& grid, std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.d)
    throw std::invalid_argument("bin_index.x: dimension mismatch with grid");
  long index = 0;
  long stride = 1;
  for (int i = 0; i < grid.d; ++i) {
    const double xi = std::clamp(x[i], 0.0, 1.0);
    const long k = std::min(grid.per_dim - 1, static_cast<long>(xi * grid.per_dim));
    index += k * stride;
    stride *= grid.per_dim;
  }
  return index;
}

std::vector<double> bin_center(const Grid& grid, long j) {
  if (j < 0 || j >= grid.total) throw std::invalid_argument("bin_center.j: out of range");
  std::vector<double> center(grid.d);
  for (int i = 0; i < grid.d; ++i) {
    const long k = j % grid.per_dim;
    j /= grid.per_dim;
    center[i] = (k + 0.5) / grid.per_dim;
  }
  return center;
}

double bin_probability(const Grid& grid, const EnvironmentSpec& spec, long j) {
  if (j < 0 || j >= grid.total)
    throw std::invalid_argument("bin_probability.j: out of range");
  (void)spec;  // uniform covariates: every cell has identical mass
  return 1.0 / static_cast<double>(grid.total);
}

}  // namespace conselab
