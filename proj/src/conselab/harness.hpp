#pragma once
// =============================================================================
// Experiment harness: flat key=value sweep configs, deterministic parallel
// execution over (policy, n, alpha, epsilon) cells, CSV round-tripping,
// log-log slope fits, trade-off summaries, and SVG rendering.
//
// Determinism contract: every replication draws from its own stream seeded by
// derive_seed(base_seed, cell_index, rep); environments are built once per
// cell from a reserved replication slot; records are emitted in canonical
// cell order (policy, then n, then alpha, then epsilon) regardless of thread
// count, so repeated sweeps produce byte-identical CSV files.
// =============================================================================

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conselab/policies.hpp"

namespace conselab {

struct SweepConfig {
  std::vector<std::string> policies = {"conse"};  // conse|dp_conse|rct|regret_min
  std::string instance = "mixed_gap";
  double instance_g = 0.4;        // constant_gap: arm separation
  long instance_m = 0;            // appendix_hard: bumps per axis (0 = default)
  std::optional<double> small_gap_override;  // mixed_gap only
  int d = 1;
  double beta = 1.0;
  double L = 1.0;
  std::vector<long> n_values = {8192, 16384, 32768, 65536, 131072, 262144, 524288};
  std::vector<double> alphas = {0.0, 1.0 / 3.0};
  std::vector<double> epsilons = {1.0};
  long replications = 30;
  uint64_t base_seed = 1;
  std::string out = "sweep.csv";
  std::string plot_out;  // optional SVG of median mise vs n per series
  TraceThinning thin = TraceThinning::kFinalOnly;
  bool emit_timing = false;  // write measured wallclock_ms instead of 0

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config_file(const std::string& path);

// Applies one key=value override using the same schema as the config file.
void apply_config_override(SweepConfig& config, const std::string& key, const std::string& value);

// Serializes one config value back to its file form (lists comma-joined).
std::string config_value(const SweepConfig& config, const std::string& key);

struct Cell {
  long index = 0;  // position in canonical order
  std::string policy;
  long n = 0;
  double alpha = 0.0;
  std::optional<double> epsilon;  // engaged only for private policies
};

// Canonical cell order: policy, then n, then alpha, then epsilon.  The
// regret-focused preset pins alpha to beta/(2 beta + d).
std::vector<Cell> enumerate_cells(const SweepConfig& config);

struct RunRecord {
  long run_id = 0;
  uint64_t seed = 0;
  std::string policy;
  std::string instance;
  int d = 1;
  double beta = 1.0;
  double L = 1.0;
  double alpha = 0.0;
  double epsilon = 0.0;  // 0 marks non-private rows
  long n = 0;
  double cum_regret = 0.0;
  double mise = 0.0;
  double simple_regret = 0.0;
  long degenerate_bin_count = 0;
  double wallclock_ms = 0.0;
};

// Environment for one cell; built from the cell's reserved stream so that
// randomized instance parameters are shared across its replications.
EnvironmentSpec build_cell_environment(const SweepConfig& config, const Cell& cell);

// One replication.  `seed` should come from derive_seed(base_seed, cell.index,
// rep).  Uses `env` when given; builds the cell environment otherwise.
RunRecord run_single(const SweepConfig& config, const Cell& cell, uint64_t seed,
                     const EnvironmentSpec* env = nullptr);

// Same, additionally handing back the full trace (respecting config.thin).
RunRecord run_single_traced(const SweepConfig& config, const Cell& cell, uint64_t seed,
                            const EnvironmentSpec* env, PolicyTrace* trace_out);

// Side files for inspected runs: cumulative regret curve (t,cum_regret) and
// per-step records (t,bin_fine,bin_coarse,arm,reward,inst_regret).
void write_curve_csv(const PolicyTrace& trace, const std::string& path);
void write_steps_csv(const PolicyTrace& trace, const std::string& path);

struct SweepResult {
  std::vector<RunRecord> records;        // canonical order
  std::vector<std::string> cell_errors;  // one line per failed cell
};

// threads <= 0 selects the hardware concurrency.
SweepResult run_sweep(const SweepConfig& config, int threads = 0);

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

double median(std::vector<double> values);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // in log space
  double rmse = 0.0;       // residual RMS in log space
};

// OLS fit of ln(y) on ln(x).  Requires >= 3 distinct x and positive values
// (rejection names the offending x).
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

struct ParetoPoint {
  std::string policy;
  double alpha = 0.0;
  double median_regret = 0.0;
  double median_mise = 0.0;
};

struct ParetoResult {
  std::vector<ParetoPoint> points;  // sorted by alpha (then policy)
  bool has_diagnostics = false;     // set when some policy covers >= 2 alphas
  bool regret_nonincreasing = true; // medians vs increasing alpha
  bool mise_nondecreasing = true;
};

// Per-(policy, alpha) medians at horizon n, with trade-off monotonicity
// diagnostics along alpha.
ParetoResult pareto_points(std::span<const RunRecord> records, long n);

// ---------------------------------------------------------------------------
// Serialization and rendering
// ---------------------------------------------------------------------------

std::string records_to_csv(std::span<const RunRecord> records);
void write_csv(std::span<const RunRecord> records, const std::string& path);
std::vector<RunRecord> parse_csv_text(const std::string& text);
std::vector<RunRecord> read_csv(const std::string& path);

// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double value);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> xy;
};

// Well-formed standalone SVG; in log-log mode each series with >= 3 distinct
// x gets a fitted-slope annotation.
std::string render_svg_plot(std::span<const PlotSeries> series, bool loglog,
                            const std::string& x_label, const std::string& y_label);
void write_svg_plot(std::span<const PlotSeries> series, bool loglog, const std::string& x_label,
                    const std::string& y_label, const std::string& path);

// Privacy-mechanism audit table (pmf normalization grid plus both
// likelihood-ratio audits); all_pass reports the conjunction.
std::string audit_report(bool& all_pass);

}  // namespace conselab
