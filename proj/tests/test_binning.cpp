#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conselab/binning.hpp"
#include "conselab/env.hpp"
#include "conselab/rng.hpp"
#include "doctest.h"

using conselab::bin_center;
using conselab::bin_index;
using conselab::bin_probability;
using conselab::Grid;
using conselab::make_grid;

namespace {
std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("per-axis resolution matches the closed form") {
  // n = 10^6, d = 1, beta = 1, alpha_exponent = 0: floor(10^(6/3)) = 100.
  CHECK(make_grid(1000000, 1, 1.0, 0.0).per_dim == 100);
  // Same n with alpha_exponent = 1/3: floor(10^(6 * (2/3) / 3)) = floor(10^(4/3)) = 21.
  CHECK(make_grid(1000000, 1, 1.0, 1.0 / 3.0).per_dim == 21);
  // Exact integer powers are not lost to floating-point rounding.
  CHECK(make_grid(1 << 15, 1, 1.0, 0.0).per_dim == 32);
  CHECK(make_grid(1 << 18, 1, 1.0, 0.0).per_dim == 64);
  // Tiny n clamps to one bin per axis: floor(2^(1/5)) = 1.
  CHECK(make_grid(2, 3, 1.0, 0.0).per_dim == 1);
  CHECK(make_grid(2, 3, 1.0, 0.0).total == 1);
}

TEST_CASE("total is per_dim to the d") {
  const Grid g = make_grid(100000, 2, 1.0, 0.0);
  CHECK(g.total == g.per_dim * g.per_dim);
  const Grid g3 = make_grid(100000, 3, 1.0, 0.0);
  CHECK(g3.total == g3.per_dim * g3.per_dim * g3.per_dim);
}

TEST_CASE("resolution shrinks as the tuning exponent grows") {
  for (long n : {5000L, 100000L, 1000000L}) {
    long prev = make_grid(n, 1, 1.0, 0.0).per_dim;
    for (double a : {0.1, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
      const long cur = make_grid(n, 1, 1.0, a).per_dim;
      CHECK(cur <= prev);
      CHECK(cur >= 1);
      prev = cur;
    }
  }
}

TEST_CASE("scalar example indices") {
  const Grid g{1, 10, 10};
  CHECK(bin_index(g, std::array{0.37}) == 3);
  CHECK(bin_index(g, std::array{0.0}) == 0);
  // The closed upper boundary belongs to the last bin.
  CHECK(bin_index(g, std::array{1.0}) == 9);
  CHECK(bin_index(g, std::array{0.999999}) == 9);
}

TEST_CASE("row-major layout puts axis 0 fastest") {
  const Grid g{2, 3, 9};
  // (0.9, 0.1) -> cell (2, 0) -> 2 + 0*3 = 2.
  CHECK(bin_index(g, std::array{0.9, 0.1}) == 2);
  // (0.1, 0.9) -> cell (0, 2) -> 0 + 2*3 = 6.
  CHECK(bin_index(g, std::array{0.1, 0.9}) == 6);
  CHECK(bin_index(g, std::array{1.0, 1.0}) == 8);
}

TEST_CASE("bin centers for a two-bin axis") {
  const Grid g{1, 2, 2};
  CHECK(bin_center(g, 0)[0] == doctest::Approx(0.25));
  CHECK(bin_center(g, 1)[0] == doctest::Approx(0.75));
}

TEST_CASE("index and center round-trip on every cell") {
  for (const Grid& g : {make_grid(1000000, 1, 1.0, 0.0), Grid{2, 31, 961}, Grid{3, 10, 1000}}) {
    for (long j = 0; j < g.total; ++j) {
      const std::vector<double> c = bin_center(g, j);
      REQUIRE(static_cast<int>(c.size()) == g.d);
      CHECK(bin_index(g, c) == j);
    }
  }
}

TEST_CASE("random covariates always land in a valid cell") {
  const Grid g{3, 7, 343};
  conselab::Rng rng(2024);
  std::vector<long> hits(g.total, 0);
  std::array<double, 3> x{};
  for (int i = 0; i < 100000; ++i) {
    for (double& xi : x) xi = rng.uniform();
    const long j = bin_index(g, x);
    REQUIRE(j >= 0);
    REQUIRE(j < g.total);
    ++hits[j];
  }
  for (long j = 0; j < g.total; ++j) CHECK(hits[j] > 0);
}

TEST_CASE("uniform bin probabilities are exact and sum to one") {
  const conselab::EnvironmentSpec spec = conselab::build_smooth_sine_instance(1, 1.0, 1.0);
  const Grid g{1, 8, 8};
  double sum = 0.0;
  for (long j = 0; j < g.total; ++j) {
    const double p = bin_probability(g, spec, j);
    CHECK(p == 1.0 / 8.0);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid construction rejects bad parameters by name") {
  CHECK(thrown_message([] { make_grid(1, 1, 1.0, 0.0); }).find("n") != std::string::npos);
  CHECK(thrown_message([] { make_grid(100, 0, 1.0, 0.0); }).find("d") != std::string::npos);
  CHECK(thrown_message([] { make_grid(100, 1, 0.0, 0.0); }).find("beta") != std::string::npos);
  CHECK(thrown_message([] { make_grid(100, 1, 1.5, 0.0); }).find("beta") != std::string::npos);
  CHECK(thrown_message([] { make_grid(100, 1, 1.0, -0.1); }).find("alpha") != std::string::npos);
  CHECK(thrown_message([] { make_grid(100, 1, 1.0, 1.1); }).find("alpha") != std::string::npos);
}

TEST_CASE("out-of-range coordinates are clamped into the cube") {
  const Grid g{1, 10, 10};
  CHECK(bin_index(g, std::array{-0.5}) == 0);
  CHECK(bin_index(g, std::array{1.5}) == 9);
}
