#pragma once
// =============================================================================
// Adaptive designs.
//
// The two-phase design splits the horizon in half.  Phase 1 runs an
// independent successive-elimination race in every fine bin: samples arrive
// in epochs of scheduled length, an epoch ends with either an elimination
// (when the observed mean gap clears the epoch threshold) or a reset into
// the next, longer epoch.  Phase 2 re-bins onto a coarser grid tuned by the
// trade-off exponent `alpha` and spends the first T* visits of each coarse
// bin on a randomized comparison used for effect estimation, then exploits
// the phase-1 winner for the rest of the horizon.
//
// The private variant randomizes every batch length and the phase-2 windows
// with the nonnegative discrete mechanism from dp.hpp, adds calibrated
// Laplace noise to every released mean, and widens elimination thresholds by
// the privacy slack.
// =============================================================================

#include <optional>
#include <string>
#include <vector>

#include "conselab/binning.hpp"
#include "conselab/env.hpp"
#include "conselab/metrics.hpp"
#include "conselab/rng.hpp"

namespace conselab {

struct ConseConfig {
  double alpha = 0.0;      // trade-off exponent in [0, beta/(2 beta + d)]
  long n = 0;              // horizon, >= 4
  double beta = 1.0;       // smoothness exponent in (0, 1]
  int d = 1;
  std::optional<double> epsilon;  // privacy budget; required when dp_enabled
  bool dp_enabled = false;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class TraceThinning : uint8_t {
  kFull,         // per-step records + regret curve + final summaries
  kRegretCurve,  // regret curve + final summaries
  kFinalOnly,    // final summaries only
};

// Per-fine-bin race state.  Means/counts always describe the current epoch.
struct SEBinState {
  uint8_t survivors = 0b11;  // bit 0: arm 0 alive, bit 1: arm 1 alive
  long epoch = 0;            // 0 until the first visit starts epoch 1
  long batch_count = 0;      // samples collected in the current epoch
  long visit_count = 0;      // lifetime visits to this bin
  double mean0 = 0.0;
  double mean1 = 0.0;
  long count0 = 0;
  long count1 = 0;
  long randomized_batch_len = 0;  // current epoch's realized length
  // Released means of the most recent completed epoch (noisy under the
  // private variant); the phase-2 exploit rule falls back to these when both
  // arms survive, and to the current running means before any epoch ends.
  double decision_mean0 = 0.0;
  double decision_mean1 = 0.0;
  bool has_decision_means = false;
};

struct StepRecord {
  long t = 0;          // 1-based step
  long bin_fine = -1;  // -1 when the step has no fine-grid role (pure RCT runs)
  long bin_coarse = -1;
  int8_t arm = 0;
  double reward = 0.0;
  double inst_regret = 0.0;
};

struct EliminationEvent {
  long t = 0;
  long bin = 0;
  long epoch = 0;
  int8_t removed_arm = 0;
};

struct PolicyTrace {
  std::string policy_name;
  ConseConfig config;
  Grid fine_grid;
  Grid coarse_grid;
  long rct_budget_nominal = 0;          // T*
  std::vector<long> coarse_rct_budget;  // realized per-coarse-bin window
  std::vector<long> coarse_rct_count;   // randomized samples actually taken
  std::vector<SEBinState> fine_states;  // frozen at the end of the run
  std::vector<EliminationEvent> eliminations;
  CateEstimate estimate;
  double cumulative_regret = 0.0;
  std::vector<double> regret_curve;  // kFull/kRegretCurve only; nondecreasing
  std::vector<StepRecord> steps;     // kFull only
  TraceThinning thinning = TraceThinning::kFinalOnly;
};

// ---------------------------------------------------------------------------
// Epoch schedule (natural logarithms throughout).
// ---------------------------------------------------------------------------

// Target gap resolved by epoch e: 2^-e.
double epoch_delta(long e);

// Scheduled batch length R_e = ceil(max{32 ln(16 n e^2) / delta_e^2,
// 8 ln(8 n e^2) / (delta_e * epsilon)}) + 1; the second branch exists only in
// the private schedule (pass nullopt for the non-private one).  Returned as
// an integer-valued double: late epochs overflow 64-bit integers while the
// schedule itself remains well-defined.
double epoch_batch_len(long e, long n, std::optional<double> epsilon = std::nullopt);

// Confidence half-width sqrt(ln(16 n e^2) / (2 R_e)), with R_e taken from the
// caller's schedule variant.
double epoch_halfwidth(long e, long n, std::optional<double> epsilon = std::nullopt);

// Privacy slack 2 ln(8 n e^2) / (R_e * epsilon), with R_e from the private
// schedule at this epsilon.
double epoch_dp_slack(long e, long n, double epsilon);

// Nominal phase-2 randomization window per coarse bin:
// floor(n^((2 beta / (2 beta + d)) * (1 - alpha))).
long rct_budget(long n, int d, double beta, double alpha);

// ---------------------------------------------------------------------------
// Designs
// ---------------------------------------------------------------------------

PolicyTrace run_conse(const ConseConfig& config, const EnvironmentSpec& spec, Rng& rng,
                      TraceThinning thinning = TraceThinning::kFinalOnly);

PolicyTrace run_dp_conse(const ConseConfig& config, const EnvironmentSpec& spec, Rng& rng,
                         TraceThinning thinning = TraceThinning::kFinalOnly);

// Pure randomized baseline on a fixed grid: every step picks an arm uniformly
// and the estimate is the per-bin difference of arm means.
PolicyTrace run_rct(long n, const EnvironmentSpec& spec, const Grid& grid, Rng& rng,
                    TraceThinning thinning = TraceThinning::kFinalOnly);

// Final bin-to-arm decision: the surviving arm where the race finished, and
// otherwise the arm with the larger final-epoch running mean (ties to arm 0).
BinPolicy extract_policy(const PolicyTrace& trace);

}  // namespace conselab
