#include "conselab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "conselab/dp.hpp"

namespace conselab {
namespace {

constexpr const char* kCsvHeader =
    "run_id,seed,policy,instance,d,beta,L,alpha,epsilon,n,cum_regret,mise,simple_regret,"
    "degenerate_bin_count,wallclock_ms";

// Reserved replication slot used to derive per-cell environment streams so
// they never collide with replication streams (reps are 0-based and small).
constexpr uint64_t kEnvironmentSlot = 0xFFFFFFFFFFFFFFFFull;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail("config." + key + ": not a number: '" + s + "'");
  return value;
}

long parse_long(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail("config." + key + ": not an integer: '" + s + "'");
  return value;
}

uint64_t parse_u64(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail("config." + key + ": not an unsigned integer: '" + s + "'");
  return value;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  fail("config." + key + ": expected 0/1/true/false, got '" + s + "'");
}

bool known_policy(const std::string& name) {
  return name == "conse" || name == "dp_conse" || name == "rct" || name == "regret_min";
}

std::string describe_cell(const Cell& cell) {
  std::string s = "cell " + std::to_string(cell.index) + " (" + cell.policy +
                  ", n=" + std::to_string(cell.n) + ", alpha=" + format_double(cell.alpha);
  if (cell.epsilon) s += ", epsilon=" + format_double(*cell.epsilon);
  return s + ")";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void SweepConfig::validate() const {
  if (policies.empty()) fail("config.policies: must not be empty");
  for (const auto& p : policies)
    if (!known_policy(p)) fail("config.policies: unknown policy '" + p + "'");
  if (instance != "mixed_gap" && instance != "smooth_sine" && instance != "constant_gap" &&
      instance != "appendix_hard")
    fail("config.instance: unknown instance '" + instance + "'");
  if (d < 1) fail("config.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("config.beta: must lie in (0, 1]");
  if (!(L > 0.0)) fail("config.L: must be positive");
  if (n_values.empty()) fail("config.n: must not be empty");
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 4) fail("config.n: horizons must be >= 4");
    if (i > 0 && n_values[i] <= n_values[i - 1])
      fail("config.n: horizons must be strictly increasing");
  }
  if (alphas.empty()) fail("config.alpha: must not be empty");
  for (const double a : alphas)
    if (!(a >= 0.0) || a > 1.0) fail("config.alpha: values must lie in [0, 1]");
  if (epsilons.empty()) fail("config.epsilon: must not be empty");
  for (const double e : epsilons)
    if (!(e > 0.0)) fail("config.epsilon: values must be positive");
  if (replications < 1) fail("config.replications: must be >= 1");
  if (std::abs(instance_g) > 1.0) fail("config.instance_g: |g| must be <= 1");
  if (instance_m < 0) fail("config.instance_m: must be >= 0");
}

void apply_config_override(SweepConfig& config, const std::string& raw_key,
                           const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "policies") {
    config.policies.clear();
    for (const auto& part : split(value, ',')) {
      const std::string name = trim(part);
      if (!name.empty()) config.policies.push_back(name);
    }
  } else if (key == "instance") {
    config.instance = value;
  } else if (key == "instance_g") {
    config.instance_g = parse_double(value, key);
  } else if (key == "instance_m") {
    config.instance_m = parse_long(value, key);
  } else if (key == "small_gap_override") {
    config.small_gap_override = parse_double(value, key);
  } else if (key == "d") {
    config.d = static_cast<int>(parse_long(value, key));
  } else if (key == "beta") {
    config.beta = parse_double(value, key);
  } else if (key == "L") {
    config.L = parse_double(value, key);
  } else if (key == "n") {
    config.n_values.clear();
    for (const auto& part : split(value, ',')) config.n_values.push_back(parse_long(part, key));
  } else if (key == "alpha") {
    config.alphas.clear();
    for (const auto& part : split(value, ',')) config.alphas.push_back(parse_double(part, key));
  } else if (key == "epsilon") {
    config.epsilons.clear();
    for (const auto& part : split(value, ',')) config.epsilons.push_back(parse_double(part, key));
  } else if (key == "replications") {
    config.replications = parse_long(value, key);
  } else if (key == "base_seed") {
    config.base_seed = parse_u64(value, key);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "plot_out") {
    config.plot_out = value;
  } else if (key == "thin") {
    if (value == "full") config.thin = TraceThinning::kFull;
    else if (value == "curve") config.thin = TraceThinning::kRegretCurve;
    else if (value == "final") config.thin = TraceThinning::kFinalOnly;
    else fail("config.thin: expected full|curve|final, got '" + value + "'");
  } else if (key == "timing") {
    config.emit_timing = parse_bool(value, key);
  } else {
    fail("config: unknown key '" + key + "'");
  }
}

std::string config_value(const SweepConfig& config, const std::string& key) {
  auto join_doubles = [](const std::vector<double>& vals) {
    std::string out;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i > 0) out += ',';
      out += format_double(vals[i]);
    }
    return out;
  };
  if (key == "policies") {
    std::string out;
    for (size_t i = 0; i < config.policies.size(); ++i) {
      if (i > 0) out += ',';
      out += config.policies[i];
    }
    return out;
  }
  if (key == "instance") return config.instance;
  if (key == "instance_g") return format_double(config.instance_g);
  if (key == "instance_m") return std::to_string(config.instance_m);
  if (key == "small_gap_override")
    return config.small_gap_override ? format_double(*config.small_gap_override) : "";
  if (key == "d") return std::to_string(config.d);
  if (key == "beta") return format_double(config.beta);
  if (key == "L") return format_double(config.L);
  if (key == "n") {
    std::string out;
    for (size_t i = 0; i < config.n_values.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(config.n_values[i]);
    }
    return out;
  }
  if (key == "alpha") return join_doubles(config.alphas);
  if (key == "epsilon") return join_doubles(config.epsilons);
  if (key == "replications") return std::to_string(config.replications);
  if (key == "base_seed") return std::to_string(config.base_seed);
  if (key == "out") return config.out;
  if (key == "plot_out") return config.plot_out;
  if (key == "thin") {
    switch (config.thin) {
      case TraceThinning::kFull: return "full";
      case TraceThinning::kRegretCurve: return "curve";
      case TraceThinning::kFinalOnly: return "final";
    }
    return "final";
  }
  if (key == "timing") return config.emit_timing ? "1" : "0";
  fail("config: unknown key '" + key + "'");
}

SweepConfig parse_config_text(const std::string& text) {
  SweepConfig config;
  std::vector<std::string> seen;
  size_t line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      fail("config: duplicate key '" + key + "'");
    seen.push_back(key);
    apply_config_override(config, key, line.substr(eq + 1));
  }
  config.validate();
  return config;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<Cell> enumerate_cells(const SweepConfig& config) {
  config.validate();
  std::vector<Cell> cells;
  const double pinned_alpha = config.beta / (2.0 * config.beta + config.d);
  for (const auto& policy : config.policies) {
    for (const long n : config.n_values) {
      const std::vector<double> alphas =
          policy == "regret_min" ? std::vector<double>{pinned_alpha} : config.alphas;
      for (const double alpha : alphas) {
        if (policy == "dp_conse") {
          for (const double eps : config.epsilons) {
            Cell cell{static_cast<long>(cells.size()), policy, n, alpha, eps};
            cells.push_back(std::move(cell));
          }
        } else {
          Cell cell{static_cast<long>(cells.size()), policy, n, alpha, std::nullopt};
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

EnvironmentSpec build_cell_environment(const SweepConfig& config, const Cell& cell) {
  if (config.instance == "mixed_gap")
    return build_mixed_gap_instance(config.d, config.beta, config.L, cell.n,
                                    config.small_gap_override);
  if (config.instance == "smooth_sine")
    return build_smooth_sine_instance(config.d, config.beta, config.L);
  if (config.instance == "constant_gap")
    return build_constant_gap_instance(config.d, config.beta, config.L, config.instance_g);

  // appendix_hard: randomized signs/codeword shared across the cell's
  // replications via the reserved environment stream.
  Rng env_rng(derive_seed(config.base_seed, static_cast<uint64_t>(cell.index), kEnvironmentSlot));
  HardInstanceParams params;
  params.m = config.instance_m;
  params.n_for_default_m = cell.n;
  long m = params.m;
  if (m <= 0)
    m = static_cast<long>(std::ceil(
        std::pow(static_cast<double>(cell.n), 1.0 / (2.0 * config.beta + config.d))));
  double cells_d = std::pow(static_cast<double>(m), config.d);
  if (cells_d > 1e7) fail("config.instance_m: m^d too large");
  const long n_cells = static_cast<long>(std::llround(cells_d));

  params.omega.resize(n_cells);
  for (auto& w : params.omega) w = env_rng.uniform() < 0.5 ? -1 : 1;
  params.v.assign(n_cells, 0);
  const int vg_exponent = static_cast<int>((n_cells + 7) / 8);
  if (n_cells >= 2 && (n_cells <= 16 || vg_exponent <= 20)) {
    const Codebook book =
        vg_codebook(static_cast<int>(n_cells), static_cast<int>((n_cells + 7) / 8), env_rng);
    const auto& word = book.words[env_rng.below(book.words.size())];
    std::copy(word.begin(), word.end(), params.v.begin());
  } else {
    // Codebooks of this size are infeasible to construct; any binary gate
    // vector is a valid estimation-region pattern.
    for (auto& g : params.v) g = env_rng.uniform() < 0.5 ? 1 : 0;
  }
  return build_appendix_hard_instance(params, config.d, config.beta, config.L);
}

namespace {

PolicyTrace dispatch_policy(const SweepConfig& config, const Cell& cell,
                            const EnvironmentSpec& env, Rng& rng) {
  ConseConfig pc;
  pc.alpha = cell.alpha;
  pc.n = cell.n;
  pc.beta = config.beta;
  pc.d = config.d;
  if (cell.policy == "conse" || cell.policy == "regret_min") return run_conse(pc, env, rng, config.thin);
  if (cell.policy == "dp_conse") {
    pc.epsilon = cell.epsilon;
    pc.dp_enabled = true;
    return run_dp_conse(pc, env, rng, config.thin);
  }
  if (cell.policy == "rct") {
    const Grid grid = make_grid(cell.n, config.d, config.beta, cell.alpha);
    return run_rct(cell.n, env, grid, rng, config.thin);
  }
  fail("config.policies: unknown policy '" + cell.policy + "'");
}

}  // namespace

RunRecord run_single_traced(const SweepConfig& config, const Cell& cell, uint64_t seed,
                            const EnvironmentSpec* env, PolicyTrace* trace_out) {
  EnvironmentSpec local_env;
  if (env == nullptr) {
    local_env = build_cell_environment(config, cell);
    env = &local_env;
  }
  Rng rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  PolicyTrace trace = dispatch_policy(config, cell, *env, rng);
  RunRecord rec;
  rec.seed = seed;
  rec.policy = cell.policy;
  rec.instance = config.instance;
  rec.d = config.d;
  rec.beta = config.beta;
  rec.L = config.L;
  rec.alpha = cell.alpha;
  rec.epsilon = cell.epsilon.value_or(0.0);
  rec.n = cell.n;
  rec.cum_regret = trace.cumulative_regret;
  rec.mise = mise(trace.estimate, *env);
  rec.simple_regret = simple_regret(extract_policy(trace), *env);
  rec.degenerate_bin_count = 0;
  for (const uint8_t flag : trace.estimate.degenerate_flags) rec.degenerate_bin_count += flag;
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.wallclock_ms = config.emit_timing ? ms : 0.0;
  if (trace_out != nullptr) *trace_out = std::move(trace);
  return rec;
}

RunRecord run_single(const SweepConfig& config, const Cell& cell, uint64_t seed,
                     const EnvironmentSpec* env) {
  return run_single_traced(config, cell, seed, env, nullptr);
}

SweepResult run_sweep(const SweepConfig& config, int threads) {
  config.validate();
  const std::vector<Cell> cells = enumerate_cells(config);
  const long reps = config.replications;

  SweepResult result;
  std::vector<std::optional<EnvironmentSpec>> envs(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    try {
      envs[i] = build_cell_environment(config, cells[i]);
    } catch (const std::exception& ex) {
      result.cell_errors.push_back(describe_cell(cells[i]) + ": " + ex.what());
    }
  }

  const long total_tasks = static_cast<long>(cells.size()) * reps;
  std::vector<RunRecord> slots(total_tasks);
  std::vector<char> valid(total_tasks, 0);
  std::atomic<long> next_task{0};
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const long idx = next_task.fetch_add(1);
      if (idx >= total_tasks) return;
      const long cell_i = idx / reps;
      const long rep = idx % reps;
      if (!envs[cell_i]) continue;
      const uint64_t seed =
          derive_seed(config.base_seed, static_cast<uint64_t>(cell_i), static_cast<uint64_t>(rep));
      try {
        slots[idx] = run_single(config, cells[cell_i], seed, &*envs[cell_i]);
        slots[idx].run_id = idx;
        valid[idx] = 1;
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mutex);
        result.cell_errors.push_back(describe_cell(cells[cell_i]) + " rep " + std::to_string(rep) +
                                     ": " + ex.what());
      }
    }
  };

  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1, 256);
  if (total_tasks > 0 && n_threads > total_tasks) n_threads = static_cast<int>(total_tasks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.records.reserve(total_tasks);
  for (long i = 0; i < total_tasks; ++i)
    if (valid[i]) result.records.push_back(std::move(slots[i]));
  return result;
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) fail("median: empty input");
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) fail("fit_loglog_slope: needs at least 3 points");
  std::vector<double> distinct;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0)) fail("fit_loglog_slope: nonpositive x at n=" + format_double(x));
    if (!(y > 0.0)) fail("fit_loglog_slope: nonpositive value at n=" + format_double(x));
    if (std::find(distinct.begin(), distinct.end(), x) == distinct.end()) distinct.push_back(x);
  }
  if (distinct.size() < 3) fail("fit_loglog_slope: needs at least 3 distinct n");

  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / points.size();
  const double my = sy / points.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double resid = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += resid * resid;
  }
  fit.rmse = std::sqrt(ss / points.size());
  return fit;
}

ParetoResult pareto_points(std::span<const RunRecord> records, long n) {
  std::map<std::pair<double, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& rec : records) {
    if (rec.n != n) continue;
    auto& [regrets, mises] = groups[{rec.alpha, rec.policy}];
    regrets.push_back(rec.cum_regret);
    mises.push_back(rec.mise);
  }
  if (groups.empty()) fail("pareto_points: no records at n=" + std::to_string(n));

  ParetoResult result;
  for (auto& [key, vals] : groups) {
    ParetoPoint point;
    point.alpha = key.first;
    point.policy = key.second;
    point.median_regret = median(std::move(vals.first));
    point.median_mise = median(std::move(vals.second));
    result.points.push_back(std::move(point));
  }
  // Map iteration already sorts by (alpha, policy); check the trade-off
  // direction along alpha within each policy.
  std::map<std::string, std::vector<const ParetoPoint*>> by_policy;
  for (const auto& point : result.points) by_policy[point.policy].push_back(&point);
  for (const auto& [policy, pts] : by_policy) {
    if (pts.size() < 2) continue;
    result.has_diagnostics = true;
    for (size_t i = 1; i < pts.size(); ++i) {
      if (pts[i]->median_regret > pts[i - 1]->median_regret) result.regret_nonincreasing = false;
      if (pts[i]->median_mise < pts[i - 1]->median_mise) result.mise_nondecreasing = false;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string records_to_csv(std::span<const RunRecord> records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.run_id);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.policy;
    out += ',';
    out += r.instance;
    out += ',';
    out += std::to_string(r.d);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.L);
    out += ',';
    out += format_double(r.alpha);
    out += ',';
    out += format_double(r.epsilon);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.cum_regret);
    out += ',';
    out += format_double(r.mise);
    out += ',';
    out += format_double(r.simple_regret);
    out += ',';
    out += std::to_string(r.degenerate_bin_count);
    out += ',';
    out += format_double(r.wallclock_ms);
    out += '\n';
  }
  return out;
}

void write_csv(std::span<const RunRecord> records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_csv: cannot open '" + path + "'");
  out << records_to_csv(records);
  if (!out) fail("write_csv: write failed for '" + path + "'");
}

std::vector<RunRecord> parse_csv_text(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || trim(lines[0]) != kCsvHeader)
    fail("parse_csv: missing or unexpected header");
  std::vector<RunRecord> records;
  records.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(trim(lines[i]), ',');
    if (fields.size() != 15)
      fail("parse_csv: line " + std::to_string(i + 1) + ": expected 15 fields");
    RunRecord r;
    r.run_id = parse_long(fields[0], "run_id");
    r.seed = parse_u64(fields[1], "seed");
    r.policy = trim(fields[2]);
    r.instance = trim(fields[3]);
    r.d = static_cast<int>(parse_long(fields[4], "d"));
    r.beta = parse_double(fields[5], "beta");
    r.L = parse_double(fields[6], "L");
    r.alpha = parse_double(fields[7], "alpha");
    r.epsilon = parse_double(fields[8], "epsilon");
    r.n = parse_long(fields[9], "n");
    r.cum_regret = parse_double(fields[10], "cum_regret");
    r.mise = parse_double(fields[11], "mise");
    r.simple_regret = parse_double(fields[12], "simple_regret");
    r.degenerate_bin_count = parse_long(fields[13], "degenerate_bin_count");
    r.wallclock_ms = parse_double(fields[14], "wallclock_ms");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RunRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("read_csv: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_text(buffer.str());
}

void write_curve_csv(const PolicyTrace& trace, const std::string& path) {
  if (trace.thinning == TraceThinning::kFinalOnly)
    fail("write_curve_csv: trace was thinned to final summaries only");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_curve_csv: cannot open '" + path + "'");
  out << "t,cum_regret\n";
  for (size_t i = 0; i < trace.regret_curve.size(); ++i)
    out << (i + 1) << ',' << format_double(trace.regret_curve[i]) << '\n';
  if (!out) fail("write_curve_csv: write failed for '" + path + "'");
}

void write_steps_csv(const PolicyTrace& trace, const std::string& path) {
  if (trace.thinning != TraceThinning::kFull)
    fail("write_steps_csv: trace does not carry per-step records");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_steps_csv: cannot open '" + path + "'");
  out << "t,bin_fine,bin_coarse,arm,reward,inst_regret\n";
  for (const auto& s : trace.steps)
    out << s.t << ',' << s.bin_fine << ',' << s.bin_coarse << ',' << static_cast<int>(s.arm) << ','
        << format_double(s.reward) << ',' << format_double(s.inst_regret) << '\n';
  if (!out) fail("write_steps_csv: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string short_number(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

}  // namespace

std::string render_svg_plot(std::span<const PlotSeries> series, bool loglog,
                            const std::string& x_label, const std::string& y_label) {
  // Transform and bound.
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  bool any = false;
  auto tx = [&](double v) { return loglog ? std::log10(v) : v; };
  for (const auto& s : series) {
    for (const auto& [x, y] : s.xy) {
      if (loglog && (!(x > 0.0) || !(y > 0.0)))
        fail("render_svg_plot: nonpositive value in log-log mode");
      const double vx = tx(x), vy = tx(y);
      if (!any) {
        min_x = max_x = vx;
        min_y = max_y = vy;
        any = true;
      } else {
        min_x = std::min(min_x, vx);
        max_x = std::max(max_x, vx);
        min_y = std::min(min_y, vy);
        max_y = std::max(max_y, vy);
      }
    }
  }
  if (!any) fail("render_svg_plot: no points to plot");
  if (max_x - min_x < 1e-12) {
    min_x -= 0.5;
    max_x += 0.5;
  }
  if (max_y - min_y < 1e-12) {
    min_y -= 0.5;
    max_y += 0.5;
  }
  const double pad_x = 0.05 * (max_x - min_x);
  const double pad_y = 0.05 * (max_y - min_y);
  min_x -= pad_x;
  max_x += pad_x;
  min_y -= pad_y;
  max_y += pad_y;

  const double width = 720, height = 540;
  const double left = 80, right = 690, top = 40, bottom = 480;
  auto px = [&](double vx) { return left + (vx - min_x) / (max_x - min_x) * (right - left); };
  auto py = [&](double vy) { return bottom - (vy - min_y) / (max_y - min_y) * (bottom - top); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
      << "\" height=\"" << bottom - top << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Ticks and grid lines.
  for (int i = 0; i <= 4; ++i) {
    const double vx = min_x + (max_x - min_x) * i / 4.0;
    const double vy = min_y + (max_y - min_y) * i / 4.0;
    const double label_x = loglog ? std::pow(10.0, vx) : vx;
    const double label_y = loglog ? std::pow(10.0, vy) : vy;
    svg << "  <line x1=\"" << px(vx) << "\" y1=\"" << bottom << "\" x2=\"" << px(vx) << "\" y2=\""
        << bottom + 6 << "\" stroke=\"#333333\"/>\n";
    svg << "  <text x=\"" << px(vx) << "\" y=\"" << bottom + 22
        << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(short_number(label_x))
        << "</text>\n";
    svg << "  <line x1=\"" << left - 6 << "\" y1=\"" << py(vy) << "\" x2=\"" << left << "\" y2=\""
        << py(vy) << "\" stroke=\"#333333\"/>\n";
    svg << "  <text x=\"" << left - 10 << "\" y=\"" << py(vy) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << xml_escape(short_number(label_y))
        << "</text>\n";
  }
  svg << "  <text x=\"" << (left + right) / 2 << "\" y=\"" << height - 8
      << "\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  svg << "  <text x=\"18\" y=\"" << (top + bottom) / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (top + bottom) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  // Series.
  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    if (s.xy.size() > 1) {
      svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.xy) svg << px(tx(x)) << "," << py(tx(y)) << " ";
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.xy)
      svg << "  <circle cx=\"" << px(tx(x)) << "\" cy=\"" << py(tx(y)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";

    std::string label = s.label;
    if (loglog) {
      std::vector<double> distinct;
      for (const auto& [x, y] : s.xy)
        if (std::find(distinct.begin(), distinct.end(), x) == distinct.end()) distinct.push_back(x);
      if (distinct.size() >= 3) {
        const SlopeFit fit = fit_loglog_slope(std::span<const std::pair<double, double>>(s.xy));
        char note[64];
        std::snprintf(note, sizeof(note), " (slope %.3f)", fit.slope);
        label += note;
      }
    }
    const double ly = top + 18 + 18 * static_cast<double>(si);
    svg << "  <line x1=\"" << right - 180 << "\" y1=\"" << ly - 4 << "\" x2=\"" << right - 160
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    svg << "  <text x=\"" << right - 154 << "\" y=\"" << ly
        << "\" font-size=\"12\" text-anchor=\"start\">" << xml_escape(label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg_plot(std::span<const PlotSeries> series, bool loglog, const std::string& x_label,
                    const std::string& y_label, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_svg_plot: cannot open '" + path + "'");
  out << render_svg_plot(series, loglog, x_label, y_label);
  if (!out) fail("write_svg_plot: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Privacy audit table
// ---------------------------------------------------------------------------

std::string audit_report(bool& all_pass) {
  all_pass = true;
  std::ostringstream out;
  char line[160];

  out << "pmf normalization audit (nonnegative discrete mechanism)\n";
  const double ms[] = {1.0, 2.0, 10.0, 1000.0};
  const double epss[] = {0.1, 1.0, 10.0};
  for (const auto& row : pmf_normalization_audit(ms, epss)) {
    all_pass = all_pass && row.pass;
    std::snprintf(line, sizeof(line), "  m=%-7g eps=%-5g total_mass=%.12f abs_error=%.3e %s\n",
                  row.m, row.epsilon, row.total_mass, row.abs_error,
                  row.pass ? "pass" : "FAIL");
    out << line;
  }

  out << "laplace-mean likelihood-ratio audit (bound eps/2)\n";
  const long r_grid[] = {1, 10, 100, 1000, 10000};
  const double eps_grid[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  for (const long r : r_grid) {
    for (const double eps : eps_grid) {
      RatioAuditParams params;
      params.epsilon = eps;
      params.R = r;
      const RatioAuditRow row = mechanism_ratio_audit(RatioMechanism::kLaplaceMean, params);
      const double deviation = std::abs(row.max_log_ratio - eps / 2.0);
      const bool pass = row.pass && deviation <= 1e-9;
      all_pass = all_pass && pass;
      std::snprintf(line, sizeof(line),
                    "  R=%-6ld eps=%-5g max_log_ratio=%.12f bound=%.12f deviation=%.3e %s\n", r,
                    eps, row.max_log_ratio, row.bound, deviation, pass ? "pass" : "FAIL");
      out << line;
    }
  }

  out << "shift likelihood-ratio audit (nonnegative discrete mechanism, bound eps)\n";
  const double m_grid[] = {1.0, 2.0, 10.0, 100.0, 1000.0};
  for (const double m : m_grid) {
    for (const double eps : epss) {
      RatioAuditParams params;
      params.epsilon = eps;
      params.m = m;
      const RatioAuditRow row = mechanism_ratio_audit(RatioMechanism::kLapPlusShift, params);
      all_pass = all_pass && row.pass;
      std::snprintf(line, sizeof(line),
                    "  m=%-7g eps=%-5g max_log_ratio=%.12f bound=%.12f %s\n", m, eps,
                    row.max_log_ratio, row.bound, row.pass ? "pass" : "FAIL");
      out << line;
    }
  }
  return out.str();
}

}  // namespace conselab
