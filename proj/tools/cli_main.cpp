// Command-line front end over the public C API.
//
// Subcommands:
//   run <config>    one replication of one cell (CSV row to stdout/--out)
//   sweep <config>  full sweep in canonical cell order
//   pareto <csv>    trade-off medians at one horizon
//   plot <csv>      SVG of per-series medians
//   audit           privacy-mechanism audit table

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conselab/conselab.h"

namespace {

struct ConfigHandle {
  clab_config* ptr = nullptr;
  ~ConfigHandle() { clab_config_free(ptr); }
};

struct RecordsHandle {
  clab_records* ptr = nullptr;
  ~RecordsHandle() { clab_records_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { clab_string_free(ptr); }
};

int report_failure(clab_status status) {
  std::fprintf(stderr, "error: %s\n", clab_last_error());
  return static_cast<int>(status);
}

// Load a config and apply any command-line overrides.
int load_config(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides,
                ConfigHandle& out) {
  if (const clab_status st = clab_config_load(path.c_str(), &out.ptr); st != CLAB_OK)
    return report_failure(st);
  for (const auto& [key, value] : overrides) {
    if (value.empty()) continue;
    if (const clab_status st = clab_config_set(out.ptr, key.c_str(), value.c_str()); st != CLAB_OK)
      return report_failure(st);
  }
  return 0;
}

std::string config_string(const clab_config* config, const std::string& key) {
  StringHandle value;
  if (clab_config_get(config, key.c_str(), &value.ptr) != CLAB_OK || value.ptr == nullptr)
    return "";
  return value.ptr;
}

int emit_records(const clab_records* records, const std::string& out_path) {
  if (!out_path.empty()) {
    if (const clab_status st = clab_records_save_csv(records, out_path.c_str()); st != CLAB_OK)
      return report_failure(st);
    return 0;
  }
  StringHandle text;
  if (const clab_status st = clab_records_to_string(records, &text.ptr); st != CLAB_OK)
    return report_failure(st);
  std::fputs(text.ptr, stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conselab: adaptive experiment-design simulation laboratory"};
  app.require_subcommand(1);

  // ---- run ----
  std::string run_config_path, run_seed, run_out, run_thin, run_trace_prefix;
  long run_cell = 0, run_rep = 0;
  auto* run_cmd = app.add_subcommand("run", "run one replication of one sweep cell");
  run_cmd->add_option("config", run_config_path, "flat key=value config file")->required();
  run_cmd->add_option("--cell", run_cell, "cell index in canonical order (default 0)");
  run_cmd->add_option("--rep", run_rep, "replication index (default 0)");
  run_cmd->add_option("--seed", run_seed, "override base_seed");
  run_cmd->add_option("--out", run_out, "write the CSV row here instead of stdout");
  run_cmd->add_option("--thin", run_thin, "trace thinning: full|curve|final")
      ->check(CLI::IsMember({"full", "curve", "final"}));
  run_cmd->add_option("--trace-prefix", run_trace_prefix,
                      "write <prefix>.curve.csv/.steps.csv when thinning allows");

  // ---- sweep ----
  std::string sweep_config_path, sweep_seed, sweep_out, sweep_thin;
  int sweep_threads = 0;
  bool sweep_timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the full sweep in canonical cell order");
  sweep_cmd->add_option("config", sweep_config_path, "flat key=value config file")->required();
  sweep_cmd->add_option("--seed", sweep_seed, "override base_seed");
  sweep_cmd->add_option("--out", sweep_out, "override the output CSV path");
  sweep_cmd->add_option("--threads", sweep_threads, "worker threads (0 = hardware)");
  sweep_cmd->add_option("--thin", sweep_thin, "trace thinning: full|curve|final")
      ->check(CLI::IsMember({"full", "curve", "final"}));
  sweep_cmd->add_flag("--timing", sweep_timing,
                      "record measured wallclock_ms (breaks byte-identical output)");

  // ---- pareto ----
  std::string pareto_csv, pareto_out;
  long pareto_n = 0;
  auto* pareto_cmd = app.add_subcommand("pareto", "trade-off medians at one horizon");
  pareto_cmd->add_option("csv", pareto_csv, "sweep results CSV")->required();
  pareto_cmd->add_option("--n", pareto_n, "horizon to slice at")->required();
  pareto_cmd->add_option("--out", pareto_out, "write the report here instead of stdout");

  // ---- plot ----
  std::string plot_csv, plot_x = "n", plot_y = "mise", plot_out = "plot.svg";
  bool plot_loglog = false;
  auto* plot_cmd = app.add_subcommand("plot", "SVG of per-series medians");
  plot_cmd->add_option("csv", plot_csv, "sweep results CSV")->required();
  plot_cmd->add_option("--x", plot_x, "x column (default n)");
  plot_cmd->add_option("--y", plot_y, "y column (default mise)");
  plot_cmd->add_flag("--loglog", plot_loglog, "log-log axes with slope annotations");
  plot_cmd->add_option("--out", plot_out, "output SVG path (default plot.svg)");

  // ---- audit ----
  auto* audit_cmd = app.add_subcommand("audit", "privacy-mechanism audit table");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    ConfigHandle config;
    if (const int rc = load_config(run_config_path,
                                   {{"base_seed", run_seed}, {"thin", run_thin}}, config))
      return rc;
    RecordsHandle records;
    const char* prefix = run_trace_prefix.empty() ? nullptr : run_trace_prefix.c_str();
    if (const clab_status st = clab_run_cell(config.ptr, run_cell, run_rep, prefix, &records.ptr);
        st != CLAB_OK)
      return report_failure(st);
    return emit_records(records.ptr, run_out);
  }

  if (sweep_cmd->parsed()) {
    ConfigHandle config;
    if (const int rc = load_config(sweep_config_path,
                                   {{"base_seed", sweep_seed},
                                    {"out", sweep_out},
                                    {"thin", sweep_thin},
                                    {"timing", sweep_timing ? "1" : ""}},
                                   config))
      return rc;
    RecordsHandle records;
    if (const clab_status st = clab_sweep_run(config.ptr, sweep_threads, &records.ptr);
        st != CLAB_OK)
      return report_failure(st);

    StringHandle errors;
    if (clab_sweep_errors(records.ptr, &errors.ptr) == CLAB_OK && errors.ptr != nullptr &&
        errors.ptr[0] != '\0')
      std::fprintf(stderr, "warning: some cells failed:\n%s", errors.ptr);

    const std::string out_path = config_string(config.ptr, "out");
    if (const clab_status st = clab_records_save_csv(records.ptr, out_path.c_str());
        st != CLAB_OK)
      return report_failure(st);
    std::fprintf(stdout, "wrote %ld records to %s\n", clab_records_count(records.ptr),
                 out_path.c_str());

    const std::string svg_path = config_string(config.ptr, "plot_out");
    if (!svg_path.empty()) {
      if (const clab_status st = clab_plot_svg(records.ptr, "n", "mise", 1, svg_path.c_str());
          st != CLAB_OK)
        return report_failure(st);
      std::fprintf(stdout, "wrote plot to %s\n", svg_path.c_str());
    }
    return 0;
  }

  if (pareto_cmd->parsed()) {
    RecordsHandle records;
    if (const clab_status st = clab_records_load_csv(pareto_csv.c_str(), &records.ptr);
        st != CLAB_OK)
      return report_failure(st);
    StringHandle report;
    if (const clab_status st = clab_pareto_report(records.ptr, pareto_n, &report.ptr);
        st != CLAB_OK)
      return report_failure(st);
    if (pareto_out.empty()) {
      std::fputs(report.ptr, stdout);
    } else {
      std::FILE* f = std::fopen(pareto_out.c_str(), "wb");
      if (f == nullptr) {
        std::fprintf(stderr, "error: cannot open '%s'\n", pareto_out.c_str());
        return static_cast<int>(CLAB_EIO);
      }
      std::fputs(report.ptr, f);
      std::fclose(f);
    }
    return 0;
  }

  if (plot_cmd->parsed()) {
    RecordsHandle records;
    if (const clab_status st = clab_records_load_csv(plot_csv.c_str(), &records.ptr);
        st != CLAB_OK)
      return report_failure(st);
    if (const clab_status st = clab_plot_svg(records.ptr, plot_x.c_str(), plot_y.c_str(),
                                             plot_loglog ? 1 : 0, plot_out.c_str());
        st != CLAB_OK)
      return report_failure(st);
    std::fprintf(stdout, "wrote plot to %s\n", plot_out.c_str());
    return 0;
  }

  if (audit_cmd->parsed()) {
    StringHandle report;
    int all_pass = 0;
    if (const clab_status st = clab_audit_report(&report.ptr, &all_pass); st != CLAB_OK)
      return report_failure(st);
    std::fputs(report.ptr, stdout);
    std::fprintf(stdout, "audit: %s\n", all_pass ? "all checks passed" : "FAILURES PRESENT");
    return all_pass ? 0 : static_cast<int>(CLAB_ERUN);
  }

  return 0;
}
