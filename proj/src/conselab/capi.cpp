// C shim over the core library: opaque handles, status codes, thread-local
// error text.  No C++ types cross this boundary.

#include "conselab/conselab.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "conselab/harness.hpp"

using namespace conselab;

struct clab_config {
  SweepConfig config;
};

struct clab_records {
  std::vector<RunRecord> records;
  std::vector<std::string> errors;
};

namespace {

thread_local std::string g_last_error;

#define CLAB_EXPORT __attribute__((visibility("default")))

clab_status set_error(clab_status status, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return status;
}

template <typename Fn>
clab_status wrap(clab_status failure_code, Fn&& fn) {
  try {
    fn();
    return CLAB_OK;
  } catch (const std::invalid_argument& ex) {
    return set_error(failure_code, ex.what());
  } catch (const std::exception& ex) {
    return set_error(CLAB_EINTERNAL, ex.what());
  } catch (...) {
    return set_error(CLAB_EINTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

clab_status require(bool ok, const char* what) {
  if (ok) return CLAB_OK;
  return set_error(CLAB_EINVAL, what);
}

double record_column(const RunRecord& rec, const std::string& column) {
  if (column == "n") return static_cast<double>(rec.n);
  if (column == "cum_regret") return rec.cum_regret;
  if (column == "mise") return rec.mise;
  if (column == "simple_regret") return rec.simple_regret;
  throw std::invalid_argument("column: expected n|cum_regret|mise|simple_regret, got '" + column +
                              "'");
}

// Per-(policy, alpha, epsilon) series of median y per distinct x.
std::vector<PlotSeries> median_series(const std::vector<RunRecord>& records,
                                      const std::string& x_column, const std::string& y_column) {
  std::map<std::tuple<std::string, double, double>, std::map<double, std::vector<double>>> groups;
  for (const auto& rec : records)
    groups[{rec.policy, rec.alpha, rec.epsilon}][record_column(rec, x_column)].push_back(
        record_column(rec, y_column));
  std::vector<PlotSeries> series;
  for (auto& [key, xs] : groups) {
    PlotSeries s;
    std::ostringstream label;
    label << std::get<0>(key) << " alpha=" << format_double(std::get<1>(key));
    if (std::get<2>(key) > 0.0) label << " eps=" << format_double(std::get<2>(key));
    s.label = label.str();
    for (auto& [x, ys] : xs) s.xy.emplace_back(x, median(std::move(ys)));
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

extern "C" {

CLAB_EXPORT const char* clab_version(void) { return "1.0.0"; }

CLAB_EXPORT const char* clab_last_error(void) { return g_last_error.c_str(); }

CLAB_EXPORT void clab_string_free(char* s) { std::free(s); }

CLAB_EXPORT clab_status clab_config_load(const char* path, clab_config** out) {
  if (require(path != nullptr && out != nullptr, "clab_config_load: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EPARSE, [&] {
    auto handle = std::make_unique<clab_config>();
    handle->config = parse_config_file(path);
    *out = handle.release();
  });
}

CLAB_EXPORT clab_status clab_config_parse(const char* text, clab_config** out) {
  if (require(text != nullptr && out != nullptr, "clab_config_parse: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EPARSE, [&] {
    auto handle = std::make_unique<clab_config>();
    handle->config = parse_config_text(text);
    *out = handle.release();
  });
}

CLAB_EXPORT clab_status clab_config_set(clab_config* config, const char* key, const char* value) {
  if (require(config != nullptr && key != nullptr && value != nullptr,
              "clab_config_set: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    apply_config_override(config->config, key, value);
    config->config.validate();
  });
}

CLAB_EXPORT clab_status clab_config_get(const clab_config* config, const char* key, char** out) {
  if (require(config != nullptr && key != nullptr && out != nullptr,
              "clab_config_get: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    *out = dup_string(config_value(config->config, key));
    if (*out == nullptr) throw std::runtime_error("out of memory");
  });
}

CLAB_EXPORT clab_status clab_config_cell_count(const clab_config* config, long* out) {
  if (require(config != nullptr && out != nullptr, "clab_config_cell_count: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL,
              [&] { *out = static_cast<long>(enumerate_cells(config->config).size()); });
}

CLAB_EXPORT void clab_config_free(clab_config* config) { delete config; }

CLAB_EXPORT clab_status clab_sweep_run(const clab_config* config, int threads,
                                       clab_records** out) {
  if (require(config != nullptr && out != nullptr, "clab_sweep_run: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_ERUN, [&] {
    auto handle = std::make_unique<clab_records>();
    SweepResult result = run_sweep(config->config, threads);
    handle->records = std::move(result.records);
    handle->errors = std::move(result.cell_errors);
    *out = handle.release();
  });
}

CLAB_EXPORT clab_status clab_run_cell(const clab_config* config, long cell_index, long rep,
                                      const char* trace_prefix, clab_records** out) {
  if (require(config != nullptr && out != nullptr, "clab_run_cell: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    const auto cells = enumerate_cells(config->config);
    if (cell_index < 0 || cell_index >= static_cast<long>(cells.size()))
      throw std::invalid_argument("clab_run_cell: cell_index out of range (have " +
                                  std::to_string(cells.size()) + " cells)");
    if (rep < 0 || rep >= config->config.replications)
      throw std::invalid_argument("clab_run_cell: rep out of range");
    const Cell& cell = cells[cell_index];
    const uint64_t seed = derive_seed(config->config.base_seed, static_cast<uint64_t>(cell_index),
                                      static_cast<uint64_t>(rep));
    auto handle = std::make_unique<clab_records>();
    PolicyTrace trace;
    RunRecord rec = run_single_traced(config->config, cell, seed, nullptr, &trace);
    rec.run_id = cell_index * config->config.replications + rep;
    if (trace_prefix != nullptr && trace.thinning != TraceThinning::kFinalOnly) {
      write_curve_csv(trace, std::string(trace_prefix) + ".curve.csv");
      if (trace.thinning == TraceThinning::kFull)
        write_steps_csv(trace, std::string(trace_prefix) + ".steps.csv");
    }
    handle->records.push_back(std::move(rec));
    *out = handle.release();
  });
}

CLAB_EXPORT clab_status clab_sweep_errors(const clab_records* records, char** out) {
  if (require(records != nullptr && out != nullptr, "clab_sweep_errors: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINTERNAL, [&] {
    std::string joined;
    for (const auto& line : records->errors) {
      joined += line;
      joined += '\n';
    }
    *out = dup_string(joined);
    if (*out == nullptr) throw std::runtime_error("out of memory");
  });
}

CLAB_EXPORT clab_status clab_records_load_csv(const char* path, clab_records** out) {
  if (require(path != nullptr && out != nullptr, "clab_records_load_csv: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EPARSE, [&] {
    auto handle = std::make_unique<clab_records>();
    handle->records = read_csv(path);
    *out = handle.release();
  });
}

CLAB_EXPORT clab_status clab_records_save_csv(const clab_records* records, const char* path) {
  if (require(records != nullptr && path != nullptr, "clab_records_save_csv: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EIO, [&] { write_csv(records->records, path); });
}

CLAB_EXPORT clab_status clab_records_to_string(const clab_records* records, char** out) {
  if (require(records != nullptr && out != nullptr, "clab_records_to_string: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINTERNAL, [&] {
    *out = dup_string(records_to_csv(records->records));
    if (*out == nullptr) throw std::runtime_error("out of memory");
  });
}

CLAB_EXPORT long clab_records_count(const clab_records* records) {
  return records == nullptr ? 0 : static_cast<long>(records->records.size());
}

CLAB_EXPORT void clab_records_free(clab_records* records) { delete records; }

CLAB_EXPORT clab_status clab_pareto_report(const clab_records* records, long n, char** out) {
  if (require(records != nullptr && out != nullptr, "clab_pareto_report: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    const ParetoResult result = pareto_points(records->records, n);
    std::ostringstream text;
    text << "trade-off points at n=" << n << "\n";
    for (const auto& p : result.points)
      text << "  alpha=" << format_double(p.alpha) << " policy=" << p.policy
           << " median_regret=" << format_double(p.median_regret)
           << " median_mise=" << format_double(p.median_mise) << "\n";
    if (result.has_diagnostics) {
      text << "diagnostics: median regret nonincreasing in alpha: "
           << (result.regret_nonincreasing ? "yes" : "NO") << "\n";
      text << "diagnostics: median mise nondecreasing in alpha: "
           << (result.mise_nondecreasing ? "yes" : "NO") << "\n";
    }
    *out = dup_string(text.str());
    if (*out == nullptr) throw std::runtime_error("out of memory");
  });
}

CLAB_EXPORT clab_status clab_fit_slope(const clab_records* records, const char* policy,
                                       double alpha, double epsilon, const char* x_column,
                                       const char* y_column, double* slope_out) {
  if (require(records != nullptr && policy != nullptr && x_column != nullptr &&
                  y_column != nullptr && slope_out != nullptr,
              "clab_fit_slope: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    std::map<double, std::vector<double>> per_x;
    for (const auto& rec : records->records) {
      if (rec.policy != policy || rec.alpha != alpha || rec.epsilon != epsilon) continue;
      per_x[record_column(rec, x_column)].push_back(record_column(rec, y_column));
    }
    std::vector<std::pair<double, double>> points;
    points.reserve(per_x.size());
    for (auto& [x, ys] : per_x) points.emplace_back(x, median(std::move(ys)));
    *slope_out = fit_loglog_slope(points).slope;
  });
}

CLAB_EXPORT clab_status clab_plot_svg(const clab_records* records, const char* x_column,
                                      const char* y_column, int loglog, const char* path) {
  if (require(records != nullptr && x_column != nullptr && y_column != nullptr && path != nullptr,
              "clab_plot_svg: null argument") != CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINVAL, [&] {
    const auto series = median_series(records->records, x_column, y_column);
    write_svg_plot(series, loglog != 0, x_column, y_column, path);
  });
}

CLAB_EXPORT clab_status clab_audit_report(char** out, int* all_pass) {
  if (require(out != nullptr && all_pass != nullptr, "clab_audit_report: null argument") !=
      CLAB_OK)
    return CLAB_EINVAL;
  return wrap(CLAB_EINTERNAL, [&] {
    bool pass = false;
    const std::string text = audit_report(pass);
    *out = dup_string(text);
    if (*out == nullptr) throw std::runtime_error("out of memory");
    *all_pass = pass ? 1 : 0;
  });
}

}  // extern "C"
