#include "conselab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conselab/dp.hpp"

namespace conselab {
namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

constexpr uint8_t kArm0 = 0b01;
constexpr uint8_t kArm1 = 0b10;
constexpr uint8_t kBoth = 0b11;

// Randomized batch lengths above this are treated as unreachable within any
// supported horizon; drawing discrete noise for them would overflow.
constexpr double kBatchLenCap = 1e15;

void check_epoch_args(long e, long n) {
  if (e < 1) fail("epoch.e: must be >= 1");
  if (n < 2) fail("epoch.n: must be >= 2");
}

double log_term_wide(long e, long n) {  // ln(16 n e^2)
  return std::log(16.0 * static_cast<double>(n) * static_cast<double>(e) * static_cast<double>(e));
}

double log_term_narrow(long e, long n) {  // ln(8 n e^2)
  return std::log(8.0 * static_cast<double>(n) * static_cast<double>(e) * static_cast<double>(e));
}

struct StepOutcome {
  int arm = 0;
  double reward = 0.0;
  double inst_regret = 0.0;
};

class TraceBuilder {
 public:
  TraceBuilder(PolicyTrace& trace, long n) : trace_(trace) {
    if (trace_.thinning != TraceThinning::kFinalOnly) trace_.regret_curve.reserve(n);
    if (trace_.thinning == TraceThinning::kFull) trace_.steps.reserve(n);
  }

  void record(long t, long bin_fine, long bin_coarse, const StepOutcome& out) {
    trace_.cumulative_regret += out.inst_regret;
    if (trace_.thinning != TraceThinning::kFinalOnly)
      trace_.regret_curve.push_back(trace_.cumulative_regret);
    if (trace_.thinning == TraceThinning::kFull)
      trace_.steps.push_back({t, bin_fine, bin_coarse, static_cast<int8_t>(out.arm), out.reward,
                              out.inst_regret});
  }

 private:
  PolicyTrace& trace_;
};

// Draws the realized length of epoch `e`; private runs randomize it.
long realized_batch_len(long e, long n, const std::optional<double>& epsilon, bool dp, Rng& rng) {
  const double nominal = epoch_batch_len(e, n, dp ? epsilon : std::nullopt);
  if (nominal > kBatchLenCap) return static_cast<long>(kBatchLenCap);
  if (!dp) return static_cast<long>(nominal);
  return lap_plus_sample(nominal, *epsilon, rng);
}

void advance_epoch(SEBinState& st, long e, long n, const std::optional<double>& epsilon, bool dp,
                   Rng& rng) {
  st.epoch = e;
  st.batch_count = 0;
  st.mean0 = st.mean1 = 0.0;
  st.count0 = st.count1 = 0;
  st.randomized_batch_len = realized_batch_len(e, n, epsilon, dp, rng);
}

int exploit_arm_for(const SEBinState& st) {
  if (st.survivors == kArm0) return 0;
  if (st.survivors == kArm1) return 1;
  if (st.has_decision_means) return st.decision_mean1 > st.decision_mean0 ? 1 : 0;
  return st.mean1 > st.mean0 ? 1 : 0;
}

PolicyTrace run_two_phase(const char* name, const ConseConfig& config, const EnvironmentSpec& spec,
                          Rng& rng, TraceThinning thinning, bool dp) {
  config.validate();
  validate_spec(spec);
  if (spec.d != config.d) fail("config.d: does not match the environment dimension");
  if (spec.beta != config.beta) fail("config.beta: does not match the environment smoothness");

  PolicyTrace trace;
  trace.policy_name = name;
  trace.config = config;
  trace.thinning = thinning;
  trace.fine_grid = make_grid(config.n, config.d, config.beta, 0.0);
  trace.coarse_grid = make_grid(config.n, config.d, config.beta, config.alpha);
  trace.rct_budget_nominal = rct_budget(config.n, config.d, config.beta, config.alpha);
  trace.fine_states.assign(trace.fine_grid.total, SEBinState{});

  TraceBuilder builder(trace, config.n);
  const long half = config.n / 2;
  auto& states = trace.fine_states;

  // ---- Phase 1: per-fine-bin successive elimination ----
  std::vector<double> x(config.d);
  for (long t = 1; t <= half; ++t) {
    for (auto& xi : x) xi = rng.uniform();
    const long j = bin_index(trace.fine_grid, x);
    SEBinState& st = states[j];
    st.visit_count += 1;

    const double m0 = spec.f0(x);
    const double m1 = spec.f1(x);
    StepOutcome out;

    if (st.epoch == 0) {
      // Bootstrap visit: start epoch 1; the sample itself is discarded.
      advance_epoch(st, 1, config.n, config.epsilon, dp, rng);
      out.arm = rng.uniform() < 0.5 ? 0 : 1;
      out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
    } else if (st.survivors != kBoth) {
      out.arm = st.survivors == kArm1 ? 1 : 0;
      out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
    } else {
      out.arm = rng.uniform() < 0.5 ? 0 : 1;
      out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
      if (out.arm == 1) {
        st.count1 += 1;
        st.mean1 += (out.reward - st.mean1) / static_cast<double>(st.count1);
      } else {
        st.count0 += 1;
        st.mean0 += (out.reward - st.mean0) / static_cast<double>(st.count0);
      }
      st.batch_count += 1;

      if (st.batch_count >= st.randomized_batch_len) {
        // Batch end: release the epoch means and decide.
        const long e = st.epoch;
        double released0 = st.mean0;
        double released1 = st.mean1;
        double threshold = 2.0 * epoch_halfwidth(e, config.n,
                                                 dp ? config.epsilon : std::nullopt);
        if (dp) {
          const double nominal = epoch_batch_len(e, config.n, config.epsilon);
          const double noise_scale = 2.0 / (*config.epsilon * nominal);
          released0 += laplace_sample(noise_scale, rng);
          released1 += laplace_sample(noise_scale, rng);
          threshold += 2.0 * epoch_dp_slack(e, config.n, *config.epsilon);
        }
        st.decision_mean0 = released0;
        st.decision_mean1 = released1;
        st.has_decision_means = true;

        if (released1 - released0 > threshold) {
          st.survivors = kArm1;
          trace.eliminations.push_back({t, j, e, 0});
        } else if (released0 - released1 > threshold) {
          st.survivors = kArm0;
          trace.eliminations.push_back({t, j, e, 1});
        } else {
          advance_epoch(st, e + 1, config.n, config.epsilon, dp, rng);
        }
      }
    }
    out.inst_regret = std::max(m0, m1) - (out.arm == 1 ? m1 : m0);
    builder.record(t, j, -1, out);
  }

  // ---- Phase 2: coarse randomized windows, then exploit ----
  const long coarse_total = trace.coarse_grid.total;
  trace.coarse_rct_budget.assign(coarse_total, trace.rct_budget_nominal);
  if (dp) {
    for (long j = 0; j < coarse_total; ++j)
      trace.coarse_rct_budget[j] =
          lap_plus_sample(static_cast<double>(std::max<long>(trace.rct_budget_nominal, 1)),
                          *config.epsilon, rng);
  }
  trace.coarse_rct_count.assign(coarse_total, 0);

  std::vector<int8_t> exploit_arm(trace.fine_grid.total);
  for (long j = 0; j < trace.fine_grid.total; ++j)
    exploit_arm[j] = static_cast<int8_t>(exploit_arm_for(states[j]));

  std::vector<double> rct_mean0(coarse_total, 0.0), rct_mean1(coarse_total, 0.0);
  std::vector<long> rct_count0(coarse_total, 0), rct_count1(coarse_total, 0);

  for (long t = half + 1; t <= config.n; ++t) {
    for (auto& xi : x) xi = rng.uniform();
    const long jc = bin_index(trace.coarse_grid, x);
    const long jf = bin_index(trace.fine_grid, x);
    const double m0 = spec.f0(x);
    const double m1 = spec.f1(x);
    StepOutcome out;

    if (trace.coarse_rct_count[jc] < trace.coarse_rct_budget[jc]) {
      out.arm = rng.uniform() < 0.5 ? 0 : 1;
      out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
      trace.coarse_rct_count[jc] += 1;
      if (out.arm == 1) {
        rct_count1[jc] += 1;
        rct_mean1[jc] += (out.reward - rct_mean1[jc]) / static_cast<double>(rct_count1[jc]);
      } else {
        rct_count0[jc] += 1;
        rct_mean0[jc] += (out.reward - rct_mean0[jc]) / static_cast<double>(rct_count0[jc]);
      }
    } else {
      out.arm = exploit_arm[jf];
      out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
    }
    out.inst_regret = std::max(m0, m1) - (out.arm == 1 ? m1 : m0);
    builder.record(t, jf, jc, out);
  }

  // ---- Release the effect estimate ----
  trace.estimate.grid = trace.coarse_grid;
  trace.estimate.values.assign(coarse_total, 0.0);
  trace.estimate.degenerate_flags.assign(coarse_total, 0);
  for (long j = 0; j < coarse_total; ++j) {
    double value = rct_mean1[j] - rct_mean0[j];
    if (dp) {
      const double scale =
          2.0 / (*config.epsilon * static_cast<double>(std::max<long>(trace.coarse_rct_budget[j], 1)));
      value += laplace_sample(scale, rng);
    }
    trace.estimate.values[j] = value;
    const bool degenerate =
        trace.coarse_rct_budget[j] == 0 || rct_count0[j] == 0 || rct_count1[j] == 0;
    trace.estimate.degenerate_flags[j] = degenerate ? 1 : 0;
  }
  return trace;
}

}  // namespace

void ConseConfig::validate() const {
  if (n < 4) fail("ConseConfig.n: must be >= 4");
  if (d < 1) fail("ConseConfig.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("ConseConfig.beta: must lie in (0, 1]");
  const double alpha_max = beta / (2.0 * beta + d) + 1e-12;
  if (!(alpha >= 0.0) || alpha > alpha_max)
    fail("ConseConfig.alpha: must lie in [0, beta/(2 beta + d)]");
  if (dp_enabled) {
    if (!epsilon || !(*epsilon > 0.0))
      fail("ConseConfig.epsilon: private runs need a positive budget");
  }
}

double epoch_delta(long e) {
  if (e < 1) fail("epoch_delta.e: must be >= 1");
  return std::ldexp(1.0, static_cast<int>(-std::min<long>(e, 1060)));
}

double epoch_batch_len(long e, long n, std::optional<double> epsilon) {
  check_epoch_args(e, n);
  const double delta = epoch_delta(e);
  double requirement = 32.0 * log_term_wide(e, n) / (delta * delta);
  if (epsilon) {
    if (!(*epsilon > 0.0)) fail("epoch_batch_len.epsilon: must be positive");
    requirement = std::max(requirement, 8.0 * log_term_narrow(e, n) / (delta * *epsilon));
  }
  return std::ceil(requirement) + 1.0;
}

double epoch_halfwidth(long e, long n, std::optional<double> epsilon) {
  check_epoch_args(e, n);
  return std::sqrt(log_term_wide(e, n) / (2.0 * epoch_batch_len(e, n, epsilon)));
}

double epoch_dp_slack(long e, long n, double epsilon) {
  check_epoch_args(e, n);
  if (!(epsilon > 0.0)) fail("epoch_dp_slack.epsilon: must be positive");
  return 2.0 * log_term_narrow(e, n) / (epoch_batch_len(e, n, epsilon) * epsilon);
}

long rct_budget(long n, int d, double beta, double alpha) {
  if (n < 2) fail("rct_budget.n: must be >= 2");
  if (d < 1) fail("rct_budget.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("rct_budget.beta: must lie in (0, 1]");
  if (!(alpha >= 0.0) || alpha > 1.0) fail("rct_budget.alpha: must lie in [0, 1]");
  return floor_power(static_cast<double>(n), (2.0 * beta / (2.0 * beta + d)) * (1.0 - alpha));
}

PolicyTrace run_conse(const ConseConfig& config, const EnvironmentSpec& spec, Rng& rng,
                      TraceThinning thinning) {
  if (config.dp_enabled) fail("run_conse.dp_enabled: use run_dp_conse for private runs");
  return run_two_phase("conse", config, spec, rng, thinning, /*dp=*/false);
}

PolicyTrace run_dp_conse(const ConseConfig& config, const EnvironmentSpec& spec, Rng& rng,
                         TraceThinning thinning) {
  if (!config.dp_enabled) fail("run_dp_conse.dp_enabled: must be set");
  return run_two_phase("dp_conse", config, spec, rng, thinning, /*dp=*/true);
}

PolicyTrace run_rct(long n, const EnvironmentSpec& spec, const Grid& grid, Rng& rng,
                    TraceThinning thinning) {
  if (n < 1) fail("run_rct.n: must be >= 1");
  validate_spec(spec);
  if (spec.d != grid.d) fail("run_rct.grid: dimension mismatch with the environment");

  PolicyTrace trace;
  trace.policy_name = "rct";
  trace.config.n = n;
  trace.config.d = spec.d;
  trace.config.beta = spec.beta;
  trace.config.alpha = 0.0;
  trace.thinning = thinning;
  trace.fine_grid = trace.coarse_grid = grid;
  trace.fine_states.assign(grid.total, SEBinState{});
  trace.coarse_rct_budget.assign(grid.total, n);
  trace.coarse_rct_count.assign(grid.total, 0);

  TraceBuilder builder(trace, n);
  std::vector<double> x(spec.d);
  for (long t = 1; t <= n; ++t) {
    for (auto& xi : x) xi = rng.uniform();
    const long j = bin_index(grid, x);
    SEBinState& st = trace.fine_states[j];
    st.visit_count += 1;
    trace.coarse_rct_count[j] += 1;

    const double m0 = spec.f0(x);
    const double m1 = spec.f1(x);
    StepOutcome out;
    out.arm = rng.uniform() < 0.5 ? 0 : 1;
    out.reward = draw_reward_with_mean(spec, out.arm == 1 ? m1 : m0, rng);
    if (out.arm == 1) {
      st.count1 += 1;
      st.mean1 += (out.reward - st.mean1) / static_cast<double>(st.count1);
    } else {
      st.count0 += 1;
      st.mean0 += (out.reward - st.mean0) / static_cast<double>(st.count0);
    }
    out.inst_regret = std::max(m0, m1) - (out.arm == 1 ? m1 : m0);
    builder.record(t, j, j, out);
  }

  trace.estimate.grid = grid;
  trace.estimate.values.assign(grid.total, 0.0);
  trace.estimate.degenerate_flags.assign(grid.total, 0);
  for (long j = 0; j < grid.total; ++j) {
    const SEBinState& st = trace.fine_states[j];
    trace.estimate.values[j] = st.mean1 - st.mean0;
    trace.estimate.degenerate_flags[j] = (st.count0 == 0 || st.count1 == 0) ? 1 : 0;
  }
  return trace;
}

BinPolicy extract_policy(const PolicyTrace& trace) {
  if (static_cast<long>(trace.fine_states.size()) != trace.fine_grid.total)
    fail("extract_policy.trace: fine states do not match the fine grid");
  BinPolicy policy;
  policy.grid = trace.fine_grid;
  policy.arms.resize(trace.fine_grid.total);
  for (long j = 0; j < trace.fine_grid.total; ++j) {
    const SEBinState& st = trace.fine_states[j];
    int arm;
    if (st.survivors == kArm0) {
      arm = 0;
    } else if (st.survivors == kArm1) {
      arm = 1;
    } else {
      arm = st.mean1 > st.mean0 ? 1 : 0;  // final-epoch running means; ties to 0
    }
    policy.arms[j] = static_cast<int8_t>(arm);
  }
  return policy;
}

}  // namespace conselab
