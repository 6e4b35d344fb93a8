#include "conselab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conselab {
namespace {

constexpr long kPointsPerBin1D = 256;
constexpr long kPointsMultiD = 4096;

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(long index, int base) {
  double result = 0.0;
  double digit_weight = 1.0 / base;
  while (index > 0) {
    result += (index % base) * digit_weight;
    index /= base;
    digit_weight /= base;
  }
  return result;
}

// Applies fn(x, weight) over the deterministic quadrature rule.
template <typename Fn>
void for_quadrature(const Grid& grid, long resolution, Fn&& fn) {
  if (grid.d == 1) {
    const double bin_width = 1.0 / grid.per_dim;
    const double weight = bin_width / resolution;
    std::vector<double> x(1);
    for (long j = 0; j < grid.total; ++j) {
      const double left = j * bin_width;
      for (long q = 0; q < resolution; ++q) {
        x[0] = left + (q + 0.5) * bin_width / resolution;
        fn(std::span<const double>(x), weight);
      }
    }
    return;
  }
  if (grid.d > static_cast<int>(std::size(kHaltonBases)))
    throw std::invalid_argument("quadrature: dimension exceeds the supported Halton bases");
  const double weight = 1.0 / static_cast<double>(resolution);
  std::vector<double> x(grid.d);
  for (long i = 1; i <= resolution; ++i) {
    for (int k = 0; k < grid.d; ++k) x[k] = radical_inverse(i, kHaltonBases[k]);
    fn(std::span<const double>(x), weight);
  }
}

void check_sized(const Grid& grid, size_t values, const char* what) {
  if (static_cast<long>(values) != grid.total) throw std::invalid_argument(what);
}

}  // namespace

double instantaneous_regret(const EnvironmentSpec& spec, std::span<const double> x, int arm) {
  if (arm != 0 && arm != 1) throw std::invalid_argument("instantaneous_regret.arm: must be 0 or 1");
  const double m0 = spec.f0(x);
  const double m1 = spec.f1(x);
  const double best = std::max(m0, m1);
  return std::max(0.0, best - (arm == 1 ? m1 : m0));
}

double mise_with_resolution(const CateEstimate& estimate, const EnvironmentSpec& spec,
                            long resolution) {
  check_sized(estimate.grid, estimate.values.size(), "mise: estimate values/grid size mismatch");
  if (resolution < 1) throw std::invalid_argument("mise.resolution: must be >= 1");
  double total = 0.0;
  for_quadrature(estimate.grid, resolution, [&](std::span<const double> x, double w) {
    const double err = estimate.values[bin_index(estimate.grid, x)] - cate(spec, x);
    total += w * err * err;
  });
  return total;
}

double mise(const CateEstimate& estimate, const EnvironmentSpec& spec) {
  return mise_with_resolution(estimate, spec,
                              estimate.grid.d == 1 ? kPointsPerBin1D : kPointsMultiD);
}

double simple_regret_with_resolution(const BinPolicy& policy, const EnvironmentSpec& spec,
                                     long resolution) {
  check_sized(policy.grid, policy.arms.size(), "simple_regret: policy arms/grid size mismatch");
  if (resolution < 1) throw std::invalid_argument("simple_regret.resolution: must be >= 1");
  double total = 0.0;
  for_quadrature(policy.grid, resolution, [&](std::span<const double> x, double w) {
    total += w * instantaneous_regret(spec, x, policy.arms[bin_index(policy.grid, x)]);
  });
  return total;
}

double simple_regret(const BinPolicy& policy, const EnvironmentSpec& spec) {
  return simple_regret_with_resolution(policy, spec,
                                       policy.grid.d == 1 ? kPointsPerBin1D : kPointsMultiD);
}

double bin_gap(const EnvironmentSpec& spec, const Grid& grid, long j) {
  const std::vector<double> center = bin_center(grid, j);
  return cate(spec, center);
}

}  // namespace conselab
