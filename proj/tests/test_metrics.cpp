#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <vector>

#include "conselab/binning.hpp"
#include "conselab/env.hpp"
#include "conselab/metrics.hpp"
#include "conselab/rng.hpp"
#include "doctest.h"

using namespace conselab;

namespace {

CateEstimate constant_estimate(const Grid& grid, double value) {
  CateEstimate est;
  est.grid = grid;
  est.values.assign(grid.total, value);
  est.degenerate_flags.assign(grid.total, 0);
  return est;
}

EnvironmentSpec linear_effect_instance() {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  spec.f0 = [](std::span<const double>) { return 0.0; };
  spec.f1 = [](std::span<const double> x) { return x[0]; };
  spec.L = 1.0;
  spec.name = "linear_effect";
  return spec;
}

}  // namespace

TEST_CASE("instantaneous regret is the shortfall against the pointwise best arm") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  CHECK(instantaneous_regret(spec, std::array{0.5}, 1) == doctest::Approx(0.0));
  CHECK(instantaneous_regret(spec, std::array{0.5}, 0) == doctest::Approx(0.4));
  // With a sign-changing effect the oracle switches arms.
  EnvironmentSpec sine = build_smooth_sine_instance(1, 1.0, 1.0);
  CHECK(instantaneous_regret(sine, std::array{0.25}, 1) == doctest::Approx(0.0));
  CHECK(instantaneous_regret(sine, std::array{0.75}, 1) == doctest::Approx(0.2));
  CHECK(instantaneous_regret(sine, std::array{0.75}, 0) == doctest::Approx(0.0));
}

TEST_CASE("mise vanishes when the estimate equals the truth") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  const Grid grid{1, 16, 16};
  CHECK(mise(constant_estimate(grid, 0.2), spec) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mise of a constant offset is the squared offset") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  const Grid grid{1, 8, 8};
  CHECK(mise(constant_estimate(grid, 0.0), spec) == doctest::Approx(0.04).epsilon(1e-9));
}

TEST_CASE("mise of the zero estimate against a linear effect is one third") {
  EnvironmentSpec spec = linear_effect_instance();
  const Grid grid{1, 16, 16};
  CHECK(mise(constant_estimate(grid, 0.0), spec) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("mise is nonnegative on random estimates") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid grid{1, 32, 32};
    CateEstimate est = constant_estimate(grid, 0.0);
    for (double& v : est.values) v = rng.uniform() - 0.5;
    CHECK(mise(est, spec) >= 0.0);
  }
}

TEST_CASE("mise is invariant under joint relabeling of piecewise-constant cells") {
  // Both the truth and the estimate are piecewise constant on one grid, so
  // the functional reduces to a per-cell average that any permutation of the
  // cells (applied to both) leaves unchanged.
  const Grid grid{1, 64, 64};
  Rng rng(29);
  std::vector<double> truth(grid.total), est_vals(grid.total);
  for (long j = 0; j < grid.total; ++j) {
    truth[j] = 0.4 * rng.uniform() - 0.2;
    est_vals[j] = 0.4 * rng.uniform() - 0.2;
  }
  auto make_spec = [&](const std::vector<double>& cells) {
    EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
    auto table = std::make_shared<std::vector<double>>(cells);
    Grid g = grid;
    spec.f0 = [](std::span<const double>) { return 0.5; };
    spec.f1 = [table, g](std::span<const double> x) {
      return 0.5 + (*table)[bin_index(g, x)];
    };
    spec.L = 1e9;  // piecewise-constant surfaces are not smooth; irrelevant here
    return spec;
  };

  CateEstimate est = constant_estimate(grid, 0.0);
  est.values = est_vals;
  const double base = mise(est, make_spec(truth));

  std::vector<long> perm(grid.total);
  std::iota(perm.begin(), perm.end(), 0);
  for (long j = grid.total - 1; j > 0; --j)
    std::swap(perm[j], perm[rng.below(static_cast<uint64_t>(j + 1))]);
  std::vector<double> truth_p(grid.total), est_p(grid.total);
  for (long j = 0; j < grid.total; ++j) {
    truth_p[j] = truth[perm[j]];
    est_p[j] = est_vals[perm[j]];
  }
  CateEstimate est2 = constant_estimate(grid, 0.0);
  est2.values = est_p;
  CHECK(mise(est2, make_spec(truth_p)) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("quadrature is converged at the default resolution") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  const Grid grid{1, 16, 16};
  CateEstimate est = constant_estimate(grid, 0.0);
  for (long j = 0; j < grid.total; ++j) est.values[j] = bin_gap(spec, grid, j);
  const double coarse = mise_with_resolution(est, spec, 256);
  const double fine = mise_with_resolution(est, spec, 512);
  CHECK(std::abs(coarse - fine) < 1e-4 * (1.0 + coarse));

  EnvironmentSpec spec2 = build_smooth_sine_instance(2, 1.0, 1.0);
  const Grid grid2{2, 5, 25};
  CateEstimate est2 = constant_estimate(grid2, 0.0);
  const double c2 = mise_with_resolution(est2, spec2, 4096);
  const double f2 = mise_with_resolution(est2, spec2, 8192);
  CHECK(std::abs(c2 - f2) < 1e-3 * (1.0 + c2));
}

TEST_CASE("simple regret vanishes when the arms are indistinguishable") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  BinPolicy policy{Grid{1, 4, 4}, {0, 1, 0, 1}};
  CHECK(simple_regret(policy, spec) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("an always-wrong policy pays the full constant gap") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  BinPolicy policy{Grid{1, 4, 4}, {0, 0, 0, 0}};
  CHECK(simple_regret(policy, spec) == doctest::Approx(0.4).epsilon(1e-9));
  BinPolicy right{Grid{1, 4, 4}, {1, 1, 1, 1}};
  CHECK(simple_regret(right, spec) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("the oracle-at-centers policy is within the smoothness resolution bound") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  const Grid grid{1, 20, 20};
  BinPolicy policy{grid, {}};
  policy.arms.resize(grid.total);
  for (long j = 0; j < grid.total; ++j)
    policy.arms[j] = bin_gap(spec, grid, j) > 0.0 ? 1 : 0;
  const double sr = simple_regret(policy, spec);
  CHECK(sr >= 0.0);
  // Misclassification only happens within L * (sqrt(d)/per_dim)^beta of a
  // sign change, and the loss there is at most that same modulus.
  const double modulus =
      spec.L * std::pow(std::sqrt(static_cast<double>(spec.d)) / grid.per_dim, spec.beta);
  CHECK(sr <= modulus);
}

TEST_CASE("simple regret is monotone in the number of wrong cells") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.3);
  const Grid grid{1, 10, 10};
  double prev = -1.0;
  for (int wrong = 0; wrong <= 10; ++wrong) {
    BinPolicy policy{grid, std::vector<int8_t>(grid.total, 1)};
    for (int j = 0; j < wrong; ++j) policy.arms[j] = 0;
    const double sr = simple_regret(policy, spec);
    CHECK(sr > prev);
    prev = sr;
  }
  CHECK(prev == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("bin gap evaluates the effect at cell centers") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  const Grid grid{1, 4, 4};
  // Center of cell 1 is x = 0.375, effect = 0.2 sin(0.75 pi).
  CHECK(bin_gap(spec, grid, 1) ==
        doctest::Approx(0.2 * std::sin(0.75 * std::numbers::pi)).epsilon(1e-12));
}
