#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conselab/env.hpp"
#include "conselab/metrics.hpp"
#include "conselab/policies.hpp"
#include "conselab/rng.hpp"
#include "doctest.h"

using namespace conselab;

namespace {

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

ConseConfig basic_config(long n, double alpha, int d = 1, double beta = 1.0) {
  ConseConfig config;
  config.n = n;
  config.alpha = alpha;
  config.d = d;
  config.beta = beta;
  return config;
}

ConseConfig dp_config(long n, double alpha, double epsilon, int d = 1, double beta = 1.0) {
  ConseConfig config = basic_config(n, alpha, d, beta);
  config.dp_enabled = true;
  config.epsilon = epsilon;
  return config;
}

}  // namespace

// ---------------------------------------------------------------------------
// Epoch schedule
// ---------------------------------------------------------------------------

TEST_CASE("epoch target gaps halve") {
  CHECK(epoch_delta(1) == doctest::Approx(0.5));
  CHECK(epoch_delta(5) == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("scheduled batch lengths match hand-computed values at n = 1000") {
  // R_e = ceil(32 ln(16 n e^2) / 2^{-2e}) + 1.
  CHECK(epoch_batch_len(1, 1000) == doctest::Approx(1241.0));
  CHECK(epoch_batch_len(2, 1000) == doctest::Approx(5668.0));
  CHECK(epoch_batch_len(3, 1000) == doctest::Approx(24327.0));
  // Values are integral even when astronomically large: ceil(32 ln(16e3 * 900) * 2^60) + 1.
  const double late = epoch_batch_len(30, 1000);
  const double expected = std::ceil(32.0 * std::log(16.0 * 1000.0 * 900.0) * 1152921504606846976.0) + 1.0;
  CHECK(late == doctest::Approx(expected).epsilon(1e-12));
  CHECK(late == std::floor(late));
}

TEST_CASE("batch lengths grow by nearly the dyadic factor") {
  for (long e = 1; e <= 20; ++e)
    CHECK(epoch_batch_len(e + 1, 1000000) / epoch_batch_len(e, 1000000) >= 1.9);
}

TEST_CASE("the private schedule reduces to the plain one as epsilon diverges") {
  for (long e = 1; e <= 10; ++e)
    CHECK(epoch_batch_len(e, 100000, 1e12) == epoch_batch_len(e, 100000));
}

TEST_CASE("the private schedule lengthens batches when epsilon is small") {
  // At tiny epsilon the linear branch 8 ln(8 n e^2)/(delta_e eps) dominates.
  CHECK(epoch_batch_len(1, 1000, 0.001) > epoch_batch_len(1, 1000));
  const double expected =
      std::ceil(8.0 * std::log(8.0 * 1000.0) / (0.5 * 0.001)) + 1.0;
  CHECK(epoch_batch_len(1, 1000, 0.001) == doctest::Approx(expected));
}

TEST_CASE("confidence half-widths match the closed form and shrink") {
  CHECK(epoch_halfwidth(1, 1000) == doctest::Approx(0.062451734792353879).epsilon(1e-15));
  for (long e = 1; e <= 5; ++e) {
    const double r = epoch_batch_len(e, 1000);
    const double expected = std::sqrt(std::log(16.0 * 1000.0 * e * e) / (2.0 * r));
    CHECK(epoch_halfwidth(e, 1000) == doctest::Approx(expected).epsilon(1e-15));
  }
  for (long e = 1; e <= 25; ++e)
    CHECK(epoch_halfwidth(e + 1, 1000000) < epoch_halfwidth(e, 1000000));
}

TEST_CASE("half-widths sit strictly inside an eighth of the target gap") {
  for (long n : {1000L, 100000L, 10000000L}) {
    // Comfortably strict through epoch 18.
    for (long e = 1; e <= 18; ++e) CHECK(epoch_halfwidth(e, n) < epoch_delta(e) / 8.0);
    // Later epochs hold with margin 1/R_e, which sinks below the resolution
    // of a double; verified up to representability.
    for (long e = 19; e <= 30; ++e)
      CHECK(epoch_halfwidth(e, n) <= (epoch_delta(e) / 8.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("privacy slack matches the closed form and halves with epsilon") {
  CHECK(epoch_dp_slack(1, 1000, 1.0) == doctest::Approx(0.014483798260535009).epsilon(1e-15));
  // When the statistical branch dominates the schedule, R_e is shared and the
  // slack is linear in 1/epsilon.
  const double c1 = epoch_dp_slack(1, 1000000, 1.0);
  const double c2 = epoch_dp_slack(1, 1000000, 2.0);
  CHECK(c2 == doctest::Approx(c1 / 2.0).epsilon(1e-12));
  for (long e = 1; e <= 30; ++e)
    CHECK(epoch_dp_slack(e, 1000000, 1.0) < epoch_delta(e) / 4.0);
}

TEST_CASE("randomization window matches the closed form") {
  CHECK(rct_budget(1000000, 1, 1.0, 1.0 / 3.0) == 464);
  // floor(n^{2/3}) at alpha = 0.
  CHECK(rct_budget(1000000, 1, 1.0, 0.0) == 10000);
  CHECK(rct_budget(1 << 15, 1, 1.0, 0.0) == 1024);
  // Larger alpha shrinks the window.
  CHECK(rct_budget(1000000, 1, 1.0, 1.0 / 3.0) < rct_budget(1000000, 1, 1.0, 0.0));
  CHECK(thrown_message([] { rct_budget(2, 1, 1.0, -0.5); }).find("alpha") != std::string::npos);
}

TEST_CASE("config validation names the offending field") {
  CHECK(thrown_message([] { basic_config(3, 0.0).validate(); }).find("n") != std::string::npos);
  CHECK(thrown_message([] { basic_config(100, -0.1).validate(); }).find("alpha") !=
        std::string::npos);
  // alpha above beta/(2 beta + d) = 1/3 is rejected.
  CHECK(thrown_message([] { basic_config(100, 0.5).validate(); }).find("alpha") !=
        std::string::npos);
  CHECK(thrown_message([] { basic_config(100, 0.0, 0).validate(); }).find("d") !=
        std::string::npos);
  CHECK(thrown_message([] { basic_config(100, 0.0, 1, 1.5).validate(); }).find("beta") !=
        std::string::npos);
  CHECK(thrown_message([] {
          ConseConfig c = basic_config(100, 0.0);
          c.dp_enabled = true;
          c.validate();
        }).find("epsilon") != std::string::npos);
  CHECK(thrown_message([] { dp_config(100, 0.0, -1.0).validate(); }).find("epsilon") !=
        std::string::npos);
}

TEST_CASE("the private entry point requires privacy and the plain one rejects it") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  Rng rng(1);
  CHECK(thrown_message([&] { run_dp_conse(basic_config(64, 0.0), spec, rng); }).find(
            "dp_enabled") != std::string::npos);
  CHECK(thrown_message([&] { run_conse(dp_config(64, 0.0, 1.0), spec, rng); }).find(
            "dp_enabled") != std::string::npos);
}

TEST_CASE("designs verify that the environment matches the config dimensions") {
  EnvironmentSpec spec = build_constant_gap_instance(2, 1.0, 1.0, 0.2);
  Rng rng(1);
  CHECK(thrown_message([&] { run_conse(basic_config(64, 0.0, 1), spec, rng); }).find("d") !=
        std::string::npos);
}

// ---------------------------------------------------------------------------
// Two-phase runs: structure
// ---------------------------------------------------------------------------

TEST_CASE("a full trace accounts for every step and phase boundary") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  Rng rng(77);
  const long n = 4096;
  PolicyTrace trace = run_conse(basic_config(n, 1.0 / 3.0), spec, rng, TraceThinning::kFull);

  CHECK(trace.policy_name == "conse");
  REQUIRE(static_cast<long>(trace.steps.size()) == n);
  REQUIRE(static_cast<long>(trace.regret_curve.size()) == n);

  const long phase1 = n / 2;
  double running = 0.0;
  for (long t = 0; t < n; ++t) {
    const StepRecord& step = trace.steps[t];
    CHECK(step.t == t + 1);
    CHECK((step.arm == 0 || step.arm == 1));
    CHECK(step.inst_regret >= 0.0);
    running += step.inst_regret;
    CHECK(trace.regret_curve[t] == doctest::Approx(running).epsilon(1e-9));
    if (t < phase1) {
      CHECK(step.bin_fine >= 0);
      CHECK(step.bin_fine < trace.fine_grid.total);
      CHECK(step.bin_coarse == -1);
    } else {
      CHECK(step.bin_coarse >= 0);
      CHECK(step.bin_coarse < trace.coarse_grid.total);
    }
  }
  CHECK(trace.cumulative_regret == doctest::Approx(running).epsilon(1e-9));
  CHECK(trace.rct_budget_nominal == rct_budget(n, 1, 1.0, 1.0 / 3.0));

  // Visit counts across fine bins account for all of phase 1.
  long visits = 0;
  for (const SEBinState& s : trace.fine_states) visits += s.visit_count;
  CHECK(visits == phase1);
  // Randomized windows never exceed their budgets and the counts match.
  REQUIRE(trace.coarse_rct_budget.size() == static_cast<size_t>(trace.coarse_grid.total));
  for (long j = 0; j < trace.coarse_grid.total; ++j) {
    CHECK(trace.coarse_rct_count[j] <= trace.coarse_rct_budget[j]);
    CHECK(trace.coarse_rct_budget[j] == trace.rct_budget_nominal);  // non-private
  }
}

TEST_CASE("regret curves are nondecreasing and thinning drops the heavy fields") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  Rng rng(3);
  PolicyTrace curve = run_conse(basic_config(2048, 0.0), spec, rng, TraceThinning::kRegretCurve);
  CHECK(curve.steps.empty());
  REQUIRE(curve.regret_curve.size() == 2048);
  for (size_t t = 1; t < curve.regret_curve.size(); ++t)
    CHECK(curve.regret_curve[t] >= curve.regret_curve[t - 1]);

  Rng rng2(3);
  PolicyTrace fin = run_conse(basic_config(2048, 0.0), spec, rng2, TraceThinning::kFinalOnly);
  CHECK(fin.steps.empty());
  CHECK(fin.regret_curve.empty());
  CHECK(fin.cumulative_regret == doctest::Approx(curve.cumulative_regret).epsilon(1e-12));
}

TEST_CASE("identical seeds reproduce identical traces") {
  EnvironmentSpec spec = build_mixed_gap_instance(1, 1.0, 1.0, 8192);
  for (bool dp : {false, true}) {
    Rng a(42), b(42);
    const ConseConfig config = dp ? dp_config(8192, 0.2, 1.0) : basic_config(8192, 0.2);
    PolicyTrace ta = dp ? run_dp_conse(config, spec, a, TraceThinning::kFull)
                        : run_conse(config, spec, a, TraceThinning::kFull);
    PolicyTrace tb = dp ? run_dp_conse(config, spec, b, TraceThinning::kFull)
                        : run_conse(config, spec, b, TraceThinning::kFull);
    CHECK(ta.cumulative_regret == tb.cumulative_regret);
    CHECK(ta.estimate.values == tb.estimate.values);
    REQUIRE(ta.steps.size() == tb.steps.size());
    for (size_t i = 0; i < ta.steps.size(); ++i) {
      CHECK(ta.steps[i].arm == tb.steps[i].arm);
      CHECK(ta.steps[i].reward == tb.steps[i].reward);
      CHECK(ta.steps[i].bin_fine == tb.steps[i].bin_fine);
    }
  }
}

TEST_CASE("indistinguishable arms cost nothing") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  Rng rng(9);
  PolicyTrace trace = run_conse(basic_config(4096, 1.0 / 3.0), spec, rng);
  CHECK(trace.cumulative_regret == 0.0);
  Rng rng2(9);
  PolicyTrace dp = run_dp_conse(dp_config(4096, 1.0 / 3.0, 1.0), spec, rng2);
  CHECK(dp.cumulative_regret == 0.0);
}

TEST_CASE("the tuning exponent shrinks the randomization window") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  Rng a(1), b(1);
  PolicyTrace wide = run_conse(basic_config(8192, 0.0), spec, a);
  PolicyTrace narrow = run_conse(basic_config(8192, 1.0 / 3.0), spec, b);
  CHECK(wide.rct_budget_nominal > narrow.rct_budget_nominal);
  // Coarser grid under the larger exponent.
  CHECK(narrow.coarse_grid.per_dim <= wide.coarse_grid.per_dim);
}

// ---------------------------------------------------------------------------
// Elimination behaviour
// ---------------------------------------------------------------------------

TEST_CASE("a large constant gap triggers eliminations of the trailing arm") {
  // Per-bin phase-1 budgets exceed the first scheduled batch only once the
  // horizon is large; 2^18 is the smallest power of two where most bins
  // finish epoch 1.
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  Rng rng(2718);
  PolicyTrace trace = run_conse(basic_config(1L << 18, 1.0 / 3.0), spec, rng);

  CHECK_FALSE(trace.eliminations.empty());
  std::set<long> eliminated_bins;
  for (const EliminationEvent& ev : trace.eliminations) {
    // At most one elimination per bin, always during phase 1.
    CHECK(eliminated_bins.insert(ev.bin).second);
    CHECK(ev.t <= (1L << 18) / 2);
    CHECK(ev.epoch >= 1);
    // The gap favors arm 1, so the removed arm is essentially always arm 0.
    CHECK(ev.removed_arm == 0);
  }
  // Eliminated bins carry a singleton survivor set consistent with the event.
  for (const EliminationEvent& ev : trace.eliminations) {
    const SEBinState& state = trace.fine_states[ev.bin];
    CHECK(state.survivors == 0b10);
  }
  // Non-eliminated bins still hold both arms.
  for (long j = 0; j < trace.fine_grid.total; ++j)
    if (!eliminated_bins.count(j)) CHECK(trace.fine_states[j].survivors == 0b11);
}

TEST_CASE("bins advance through epochs as visits accumulate") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  Rng rng(31);
  PolicyTrace trace = run_conse(basic_config(1L << 16, 0.0), spec, rng);
  long max_epoch = 0;
  for (const SEBinState& s : trace.fine_states) {
    CHECK(s.epoch >= 1);  // every bin is visited at this horizon
    max_epoch = std::max(max_epoch, s.epoch);
    CHECK(s.visit_count >= 1);
  }
  CHECK(max_epoch >= 1);
}

// ---------------------------------------------------------------------------
// Estimates and extracted policies
// ---------------------------------------------------------------------------

TEST_CASE("estimates recover the sign of a clear constant gap") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  int wrong_bins = 0;
  long total_bins = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(1000 + rep);
    PolicyTrace trace = run_conse(basic_config(1 << 15, 0.0), spec, rng);
    REQUIRE(trace.estimate.values.size() ==
            static_cast<size_t>(trace.estimate.grid.total));
    for (double v : trace.estimate.values) wrong_bins += (v <= 0.0);
    total_bins += trace.estimate.grid.total;
    for (uint8_t flag : trace.estimate.degenerate_flags) CHECK(flag == 0);
  }
  CHECK(static_cast<double>(wrong_bins) / static_cast<double>(total_bins) < 0.05);
}

TEST_CASE("the extracted policy follows survivors, means, and the tie rule") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  Rng rng(4);
  PolicyTrace trace = run_conse(basic_config(1024, 0.0), spec, rng);
  trace.fine_states.assign(trace.fine_grid.total, SEBinState{});

  trace.fine_states[0].survivors = 0b01;  // only arm 0 alive
  trace.fine_states[1].survivors = 0b10;  // only arm 1 alive
  trace.fine_states[2].survivors = 0b11;  // both alive, arm 1 ahead
  trace.fine_states[2].mean0 = 0.2;
  trace.fine_states[2].mean1 = 0.6;
  trace.fine_states[3].survivors = 0b11;  // both alive, exact tie -> arm 0
  trace.fine_states[3].mean0 = 0.4;
  trace.fine_states[3].mean1 = 0.4;

  const BinPolicy policy = extract_policy(trace);
  CHECK(policy.arms[0] == 0);
  CHECK(policy.arms[1] == 1);
  CHECK(policy.arms[2] == 1);
  CHECK(policy.arms[3] == 0);
}

TEST_CASE("wrong survivors are rare on a well-separated instance") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  int wrong = 0;
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(555, 0, static_cast<uint64_t>(rep)));
    PolicyTrace trace = run_conse(basic_config(5000, 1.0 / 3.0), spec, rng);
    const BinPolicy policy = extract_policy(trace);
    const bool any_wrong =
        std::any_of(policy.arms.begin(), policy.arms.end(), [](int8_t a) { return a != 1; });
    wrong += any_wrong;
  }
  CHECK(static_cast<double>(wrong) / reps <= 0.05);
}

TEST_CASE("with a huge privacy budget the private design is as accurate") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  int agree = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng_dp(derive_seed(777, 1, static_cast<uint64_t>(rep)));
    PolicyTrace dp = run_dp_conse(dp_config(5000, 1.0 / 3.0, 1e6), spec, rng_dp);
    const BinPolicy dp_policy = extract_policy(dp);
    const bool all_right =
        std::all_of(dp_policy.arms.begin(), dp_policy.arms.end(), [](int8_t a) { return a == 1; });
    agree += all_right;
  }
  CHECK(static_cast<double>(agree) / reps >= 0.95);
}

// ---------------------------------------------------------------------------
// Private variant specifics
// ---------------------------------------------------------------------------

TEST_CASE("private runs randomize batch lengths and windows but stay valid") {
  EnvironmentSpec spec = build_mixed_gap_instance(1, 1.0, 1.0, 16384);
  Rng rng(88);
  PolicyTrace trace = run_dp_conse(dp_config(16384, 1.0 / 3.0, 1.0), spec, rng);

  for (const SEBinState& s : trace.fine_states) CHECK(s.randomized_batch_len >= 0);
  bool any_window_differs = false;
  for (long j = 0; j < trace.coarse_grid.total; ++j) {
    CHECK(trace.coarse_rct_budget[j] >= 0);
    any_window_differs =
        any_window_differs || trace.coarse_rct_budget[j] != trace.rct_budget_nominal;
  }
  // With a lap-plus window at eps = 1 the chance every coarse bin draws its
  // nominal value exactly is negligible.
  CHECK(any_window_differs);

  // Estimates exist for every coarse bin and are finite.
  for (double v : trace.estimate.values) CHECK(std::isfinite(v));
  REQUIRE(trace.estimate.degenerate_flags.size() ==
          static_cast<size_t>(trace.coarse_grid.total));
}

TEST_CASE("degenerate windows are flagged rather than silently averaged") {
  // A tiny nominal window (T* = 6 at n = 64) plus window randomization makes
  // zero- and single-sample windows common, and those must carry the flag.
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.2);
  long flagged = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(123, 5, static_cast<uint64_t>(rep)));
    PolicyTrace trace = run_dp_conse(dp_config(64, 1.0 / 3.0, 0.5), spec, rng);
    for (size_t j = 0; j < trace.estimate.degenerate_flags.size(); ++j) {
      flagged += trace.estimate.degenerate_flags[j];
      CHECK(std::isfinite(trace.estimate.values[j]));
    }
  }
  CHECK(flagged > 0);
}

TEST_CASE("private estimates carry calibrated noise") {
  // On a zero-gap instance the non-private estimate is a difference of means
  // with variance ~1/T; the private one adds Laplace(2/(eps T)) noise.  At
  // moderate T the noise dominates, so the spread must widen measurably.
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  double plain_sq = 0.0, private_sq = 0.0;
  long plain_count = 0, private_count = 0;
  for (int rep = 0; rep < 60; ++rep) {
    Rng a(derive_seed(31, 2, static_cast<uint64_t>(rep)));
    Rng b(derive_seed(31, 3, static_cast<uint64_t>(rep)));
    PolicyTrace plain = run_conse(basic_config(4096, 0.0), spec, a);
    PolicyTrace priv = run_dp_conse(dp_config(4096, 0.0, 0.05), spec, b);
    for (double v : plain.estimate.values) {
      plain_sq += v * v;
      ++plain_count;
    }
    for (size_t j = 0; j < priv.estimate.values.size(); ++j) {
      if (priv.estimate.degenerate_flags[j]) continue;
      private_sq += priv.estimate.values[j] * priv.estimate.values[j];
      ++private_count;
    }
  }
  REQUIRE(plain_count > 0);
  REQUIRE(private_count > 0);
  CHECK(private_sq / private_count > 2.0 * plain_sq / plain_count);
}

// ---------------------------------------------------------------------------
// Randomized baseline
// ---------------------------------------------------------------------------

TEST_CASE("the randomized baseline pays half the gap per step") {
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.4);
  const Grid grid = make_grid(10000, 1, 1.0, 0.0);
  double total = 0.0;
  const int reps = 30;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(99, 4, static_cast<uint64_t>(rep)));
    PolicyTrace trace = run_rct(10000, spec, grid, rng);
    CHECK(trace.policy_name == "rct");
    total += trace.cumulative_regret;
  }
  CHECK(std::abs(total / reps - 2000.0) < 100.0);
}

TEST_CASE("the randomized baseline balances arms") {
  EnvironmentSpec spec = build_smooth_sine_instance(1, 1.0, 1.0);
  const Grid grid = make_grid(1 << 16, 1, 1.0, 0.0);
  Rng rng(6);
  PolicyTrace trace = run_rct(1 << 16, spec, grid, rng, TraceThinning::kFull);
  long arm1 = 0;
  for (const StepRecord& s : trace.steps) arm1 += s.arm;
  const double n = static_cast<double>(1 << 16);
  CHECK(std::abs(arm1 - n / 2.0) < 4.0 * std::sqrt(n));
}

TEST_CASE("baseline estimation error shrinks like one over the horizon") {
  // Fixed grid, zero gap: the per-bin difference of means has variance
  // proportional to 1/samples, so the integrated squared error scales as 1/n.
  EnvironmentSpec spec = build_constant_gap_instance(1, 1.0, 1.0, 0.0);
  const Grid grid{1, 4, 4};
  std::vector<double> xs, ys;
  for (long n : {1L << 10, 1L << 11, 1L << 12, 1L << 13, 1L << 14}) {
    std::vector<double> errs;
    for (int rep = 0; rep < 30; ++rep) {
      Rng rng(derive_seed(7, static_cast<uint64_t>(n), static_cast<uint64_t>(rep)));
      PolicyTrace trace = run_rct(n, spec, grid, rng);
      errs.push_back(mise(trace.estimate, spec));
    }
    std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(errs[errs.size() / 2]));
  }
  // Least-squares slope of log error vs log horizon.
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.15));
}
