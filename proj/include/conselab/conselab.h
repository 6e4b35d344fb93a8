/* =============================================================================
 * conselab — adaptive experiment-design simulation laboratory.
 *
 * Stable C surface over the C++ core: opaque handles, integer status codes,
 * and a thread-local textual error.  Every function that can fail returns a
 * clab_status; on failure the output parameters are left untouched and
 * clab_last_error() describes the problem.
 *
 * Strings returned through char** are heap-allocated; release them with
 * clab_string_free().  Handles are released with their matching *_free().
 * ===========================================================================*/
#ifndef CONSELAB_H
#define CONSELAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clab_status {
  CLAB_OK = 0,
  CLAB_EINVAL = 1,   /* invalid argument / config value */
  CLAB_EPARSE = 2,   /* malformed config or CSV text */
  CLAB_EIO = 3,      /* file could not be read or written */
  CLAB_ERUN = 4,     /* execution failed (see clab_last_error) */
  CLAB_EINTERNAL = 5 /* unexpected internal failure */
} clab_status;

typedef struct clab_config clab_config;   /* sweep configuration */
typedef struct clab_records clab_records; /* result table */

/* Library version string (static storage; do not free). */
const char* clab_version(void);

/* Thread-local description of the most recent failure (static storage). */
const char* clab_last_error(void);

void clab_string_free(char* s);

/* ---- configuration ------------------------------------------------------ */

/* Parse a flat key=value config file / text.  Unknown keys are rejected. */
clab_status clab_config_load(const char* path, clab_config** out);
clab_status clab_config_parse(const char* text, clab_config** out);

/* Apply one key=value override (same schema as the config file). */
clab_status clab_config_set(clab_config* config, const char* key, const char* value);

/* Read one config value back in its file form (lists comma-joined). */
clab_status clab_config_get(const clab_config* config, const char* key, char** out);

/* Number of (policy, n, alpha, epsilon) cells in canonical order. */
clab_status clab_config_cell_count(const clab_config* config, long* out);

void clab_config_free(clab_config* config);

/* ---- execution ----------------------------------------------------------- */

/* Full sweep; threads <= 0 selects hardware concurrency.  Per-cell failures
 * are reported via clab_sweep_errors on the returned records handle. */
clab_status clab_sweep_run(const clab_config* config, int threads, clab_records** out);

/* One replication of one cell.  When trace_prefix is non-NULL and the config
 * requests curve/full thinning, writes <prefix>.curve.csv (and
 * <prefix>.steps.csv for full traces). */
clab_status clab_run_cell(const clab_config* config, long cell_index, long rep,
                          const char* trace_prefix, clab_records** out);

/* Newline-separated per-cell failure lines ("" when the sweep was clean). */
clab_status clab_sweep_errors(const clab_records* records, char** out);

/* ---- result tables ------------------------------------------------------- */

clab_status clab_records_load_csv(const char* path, clab_records** out);
clab_status clab_records_save_csv(const clab_records* records, const char* path);
clab_status clab_records_to_string(const clab_records* records, char** out);
long clab_records_count(const clab_records* records);
void clab_records_free(clab_records* records);

/* ---- analysis ------------------------------------------------------------ */

/* Median-regret / median-error trade-off per (policy, alpha) at horizon n,
 * rendered as a text report with monotonicity diagnostics. */
clab_status clab_pareto_report(const clab_records* records, long n, char** out);

/* Log-log OLS slope of column y against column x over per-x medians within
 * the given policy/alpha/epsilon slice.  Columns: n, cum_regret, mise,
 * simple_regret. */
clab_status clab_fit_slope(const clab_records* records, const char* policy, double alpha,
                           double epsilon, const char* x_column, const char* y_column,
                           double* slope_out);

/* Median of y_column vs x_column per (policy, alpha, epsilon) series, as an
 * SVG plot (optionally log-log with slope annotations). */
clab_status clab_plot_svg(const clab_records* records, const char* x_column, const char* y_column,
                          int loglog, const char* path);

/* Privacy-mechanism audit table; *all_pass is 1 when every row passes. */
clab_status clab_audit_report(char** out, int* all_pass);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONSELAB_H */
