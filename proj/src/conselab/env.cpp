#include "conselab/env.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace conselab {
namespace {

constexpr double kHolderSlack = 1e-9;  // pass margin for certification ratios

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

double holder_ratio(double dv, double dist, double beta, double L) {
  if (dist <= 0.0) return 0.0;
  const double denom = (beta == 1.0) ? dist : std::pow(dist, beta);
  return std::abs(dv) / (L * denom);
}

double pair_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

// Max Hölder ratio over all pairs of a 1-D profile sampled at `ts` along one
// axis (all other coordinates held fixed): used for certifying constructions
// whose variation is carried by a single coordinate or the diagonal.
double scan_profile(const std::vector<double>& ts, const std::vector<double>& vals, double beta,
                    double L, double dist_per_unit) {
  double worst = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    for (size_t j = i + 1; j < ts.size(); ++j) {
      const double dist = (ts[j] - ts[i]) * dist_per_unit;
      worst = std::max(worst, holder_ratio(vals[j] - vals[i], dist, beta, L));
    }
  }
  return worst;
}

// C1 cubic smoothstep on [0,1].
double cubic_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

// --------------------------------------------------------------------------
// C-infinity unit step: the normalized integral of exp(-1/(s(1-s))).
// Tabulated once by composite Simpson; linear interpolation between knots is
// far below every tolerance used against this surface.
// --------------------------------------------------------------------------

constexpr int kSigmaKnots = 8192;

const std::array<double, kSigmaKnots + 1>& sigma_table() {
  static const std::array<double, kSigmaKnots + 1> table = [] {
    std::array<double, kSigmaKnots + 1> cdf{};
    auto phi_hat = [](double s) {
      if (s <= 0.0 || s >= 1.0) return 0.0;
      return std::exp(-1.0 / (s * (1.0 - s)));
    };
    cdf[0] = 0.0;
    const double step = 1.0 / kSigmaKnots;
    for (int i = 0; i < kSigmaKnots; ++i) {
      const double a = i * step;
      const double piece =
          step / 6.0 * (phi_hat(a) + 4.0 * phi_hat(a + 0.5 * step) + phi_hat(a + step));
      cdf[i + 1] = cdf[i] + piece;
    }
    const double total = cdf[kSigmaKnots];
    for (auto& v : cdf) v /= total;
    return cdf;
  }();
  return table;
}

double smooth_sigma(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const auto& tab = sigma_table();
  const double pos = t * kSigmaKnots;
  const int i = std::min(static_cast<int>(pos), kSigmaKnots - 1);
  const double frac = pos - i;
  return tab[i] * (1.0 - frac) + tab[i + 1] * frac;
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) ts[i] = lo + (hi - lo) * i / (count - 1);
  return ts;
}

}  // namespace

void validate_spec(const EnvironmentSpec& spec) {
  if (spec.d < 1) fail("EnvironmentSpec.d: must be >= 1");
  if (!(spec.beta > 0.0) || spec.beta > 1.0) fail("EnvironmentSpec.beta: must lie in (0, 1]");
  if (!(spec.L > 0.0)) fail("EnvironmentSpec.L: must be positive");
  if (!spec.f0 || !spec.f1) fail("EnvironmentSpec.f0/f1: mean surfaces must be set");
  if (spec.noise == NoiseModel::kTruncatedGaussian && !(spec.noise_sigma > 0.0))
    fail("EnvironmentSpec.noise_sigma: must be positive");
}

std::vector<double> sample_covariate(const EnvironmentSpec& spec, Rng& rng) {
  std::vector<double> x(spec.d);
  for (auto& xi : x) xi = rng.uniform();
  return x;
}

double draw_reward_with_mean(const EnvironmentSpec& spec, double mean, Rng& rng) {
  switch (spec.noise) {
    case NoiseModel::kBernoulli:
      return rng.uniform() < mean ? 1.0 : 0.0;
    case NoiseModel::kTruncatedGaussian: {
      const double y = mean + spec.noise_sigma * rng.normal01();
      return std::clamp(y, 0.0, 1.0);
    }
  }
  fail("EnvironmentSpec.noise: unknown noise model");
}

double draw_reward(const EnvironmentSpec& spec, std::span<const double> x, int arm, Rng& rng) {
  if (arm != 0 && arm != 1) fail("draw_reward.arm: must be 0 or 1");
  const double mean = arm == 1 ? spec.f1(x) : spec.f0(x);
  if (mean < -1e-12 || mean > 1.0 + 1e-12) fail("EnvironmentSpec: mean outside [0,1] at query point");
  return draw_reward_with_mean(spec, std::clamp(mean, 0.0, 1.0), rng);
}

double cate(const EnvironmentSpec& spec, std::span<const double> x) {
  return spec.f1(x) - spec.f0(x);
}

HolderReport holder_check(const EnvironmentSpec& spec, long pair_count, Rng& rng) {
  validate_spec(spec);
  if (pair_count < 1) fail("holder_check.pair_count: must be >= 1");
  HolderReport report;
  std::vector<double> x(spec.d), y(spec.d);
  for (long p = 0; p < pair_count; ++p) {
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    const double dist = pair_distance(x, y);
    if (dist <= 0.0) continue;
    const double r0 = holder_ratio(spec.f0(x) - spec.f0(y), dist, spec.beta, spec.L);
    const double r1 = holder_ratio(spec.f1(x) - spec.f1(y), dist, spec.beta, spec.L);
    report.max_ratio = std::max({report.max_ratio, r0, r1});
  }
  report.pass = report.max_ratio <= 1.0 + kHolderSlack;
  return report;
}

// -----------------------------------------------------------------------------
// Builders
// -----------------------------------------------------------------------------

EnvironmentSpec build_mixed_gap_instance(int d, double beta, double L, long n,
                                         std::optional<double> small_gap_override) {
  if (d < 1) fail("mixed_gap.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("mixed_gap.beta: must lie in (0, 1]");
  if (!(L > 0.0)) fail("mixed_gap.L: must be positive");
  if (n < 2) fail("mixed_gap.n: must be >= 2");

  const double delta = small_gap_override
                           ? *small_gap_override
                           : std::pow(static_cast<double>(n), -beta / (2.0 * beta + d));
  const double gap_const = std::min(0.25, L / std::pow(3.0, beta));
  if (!(delta > 0.0)) fail("mixed_gap.small_gap_override: must be positive");
  if (delta > gap_const)
    fail("mixed_gap.small_gap_override: exceeds the constant gap " + std::to_string(gap_const));

  const double band_width = std::pow(std::min(delta, 0.1), 1.0 / beta) / 2.0;
  const double lo = 0.5 - band_width / 2.0;
  const double hi = 0.5 + band_width / 2.0;
  const double top = 0.5 + delta;      // plateau for x_1 < 1/2
  const double bottom = 0.5 - gap_const;  // plateau for x_1 > 1/2

  EnvironmentSpec spec;
  spec.d = d;
  spec.beta = beta;
  spec.L = L;
  spec.name = "mixed_gap";
  spec.f0 = [](std::span<const double>) { return 0.5; };
  spec.f1 = [lo, hi, top, bottom, band_width](std::span<const double> x) {
    const double u = x[0];
    if (u <= lo) return top;
    if (u >= hi) return bottom;
    return top + (bottom - top) * cubic_step((u - lo) / band_width);
  };

  // Certify the declared budget.  The profile varies only along axis 1, so
  // the axis scan over the band window dominates every d-dimensional pair.
  double certified;
  if (beta == 1.0) {
    certified = 1.5 * (top - bottom) / band_width;  // peak slope of the cubic step
  } else {
    const auto ts = linspace(std::max(0.0, lo - band_width), std::min(1.0, hi + band_width), 2001);
    std::vector<double> vals(ts.size());
    std::vector<double> pt(d, 0.5);
    for (size_t i = 0; i < ts.size(); ++i) {
      pt[0] = ts[i];
      vals[i] = spec.f1(pt);
    }
    certified = scan_profile(ts, vals, beta, 1.0, 1.0) * 1.001;
  }
  spec.L = std::max(L, certified * (1.0 + 1e-6));
  return spec;
}

EnvironmentSpec build_smooth_sine_instance(int d, double beta, double L) {
  if (d < 1) fail("smooth_sine.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("smooth_sine.beta: must lie in (0, 1]");
  if (!(L > 0.0)) fail("smooth_sine.L: must be positive");

  EnvironmentSpec spec;
  spec.d = d;
  spec.beta = beta;
  spec.L = L;
  spec.name = "smooth_sine";
  spec.f0 = [](std::span<const double>) { return 0.5; };
  spec.f1 = [](std::span<const double> x) {
    return 0.5 + 0.2 * std::sin(2.0 * std::acos(-1.0) * x[0]);
  };

  // Pairs at axis-1 separation t differ by at most 0.4|sin(pi t)| (attained),
  // so the declared budget is sup_t 0.4|sin(pi t)| / t^beta.
  const double pi = std::acos(-1.0);
  double certified;
  if (beta == 1.0) {
    certified = 0.4 * pi;  // the sup is the slope at t -> 0
  } else {
    certified = 0.0;
    for (int i = 1; i <= 200000; ++i) {
      const double t = static_cast<double>(i) / 200000;
      certified = std::max(certified, 0.4 * std::abs(std::sin(pi * t)) / std::pow(t, beta));
    }
    certified *= 1.001;
  }
  spec.L = std::max(L, certified * (1.0 + 1e-6));
  return spec;
}

EnvironmentSpec build_constant_gap_instance(int d, double beta, double L, double g) {
  if (d < 1) fail("constant_gap.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("constant_gap.beta: must lie in (0, 1]");
  if (!(L > 0.0)) fail("constant_gap.L: must be positive");
  if (std::abs(g) > 1.0) fail("constant_gap.g: |g| must be <= 1");

  EnvironmentSpec spec;
  spec.d = d;
  spec.beta = beta;
  spec.L = L;
  spec.name = "constant_gap";
  const double lo_arm = 0.5 - g / 2.0;
  const double hi_arm = 0.5 + g / 2.0;
  spec.f0 = [lo_arm](std::span<const double>) { return lo_arm; };
  spec.f1 = [hi_arm](std::span<const double>) { return hi_arm; };
  return spec;  // constant surfaces: seminorm 0, declared budget unchanged
}

// -----------------------------------------------------------------------------
// Bump kernel and codebook
// -----------------------------------------------------------------------------

double bump_kernel(std::span<const double> u) {
  double prod = 1.0;
  for (const double ui : u) {
    const double t = 12.0 * ui;
    if (t <= -1.0 || t >= 1.0) return 0.0;
    prod *= std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  return prod;
}

namespace {

int hamming(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
  int dist = 0;
  for (size_t i = 0; i < a.size(); ++i) dist += std::popcount(a[i] ^ b[i]);
  return dist;
}

}  // namespace

Codebook vg_codebook(int N, int min_distance, Rng& rng) {
  if (N < 1) fail("vg_codebook.N: must be >= 1");
  if (min_distance < 1 || min_distance > N)
    fail("vg_codebook.min_distance: must lie in [1, N]");

  Codebook book;
  book.word_length = N;
  book.min_distance = min_distance;

  const int blocks = (N + 63) / 64;
  std::vector<std::vector<uint64_t>> accepted;

  auto try_accept = [&](const std::vector<uint64_t>& cand) {
    for (const auto& w : accepted)
      if (hamming(w, cand) < min_distance) return false;
    accepted.push_back(cand);
    return true;
  };

  if (N <= 16) {
    // Exhaustive greedy pass over every word in a shuffled order yields a
    // maximal codebook (e.g. all 2^N words when min_distance is 1).
    const uint32_t count = 1u << N;
    std::vector<uint32_t> order(count);
    for (uint32_t i = 0; i < count; ++i) order[i] = i;
    for (uint32_t i = count - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);
    if (min_distance == 1) {
      for (const uint32_t w : order) accepted.push_back({w});
    } else {
      for (const uint32_t w : order) try_accept({w});
    }
  } else {
    const int exponent = (N + 7) / 8;
    if (exponent > 24)
      fail("vg_codebook.N: sampled construction infeasible (target exceeds 2^24 words)");
    const long target = 1L << exponent;
    const long budget = 256L * target + 100000L;
    std::vector<uint64_t> cand(blocks);
    for (long tries = 0; tries < budget && static_cast<long>(accepted.size()) < target; ++tries) {
      for (auto& blk : cand) blk = rng.next_u64();
      const int tail_bits = N % 64;
      if (tail_bits != 0) cand.back() &= (~0ull >> (64 - tail_bits));
      try_accept(cand);
    }
    if (static_cast<long>(accepted.size()) < target)
      fail("vg_codebook: candidate budget exhausted before reaching the target size");
  }

  if (accepted.size() < 2) fail("vg_codebook: fewer than two words satisfy the distance bound");

  book.words.reserve(accepted.size());
  for (const auto& w : accepted) {
    std::vector<uint8_t> bits(N);
    for (int i = 0; i < N; ++i) bits[i] = (w[i / 64] >> (i % 64)) & 1;
    book.words.push_back(std::move(bits));
  }
  return book;
}

// -----------------------------------------------------------------------------
// Hard instance
// -----------------------------------------------------------------------------

double kernel_seminorm(int d, double beta) {
  static std::mutex mu;
  static std::map<std::pair<int, uint64_t>, double> cache;
  const std::pair<int, uint64_t> key{d, std::bit_cast<uint64_t>(beta)};
  std::lock_guard<std::mutex> lock(mu);
  if (const auto it = cache.find(key); it != cache.end()) return it->second;

  // Deterministic one-time estimate over 1e5 pairs in the kernel support box.
  Rng rng(mix64(0x4B45524E454Cull ^ (static_cast<uint64_t>(d) << 32) ^
                std::bit_cast<uint64_t>(beta)));
  std::vector<double> u(d), w(d);
  double worst = 0.0;
  for (int p = 0; p < 100000; ++p) {
    for (auto& v : u) v = uniform_in(rng, -1.0 / 12.0, 1.0 / 12.0);
    for (auto& v : w) v = uniform_in(rng, -1.0 / 12.0, 1.0 / 12.0);
    const double dist = pair_distance(u, w);
    if (dist <= 0.0) continue;
    worst = std::max(worst, holder_ratio(bump_kernel(u) - bump_kernel(w), dist, beta, 1.0));
  }
  cache[key] = worst;
  return worst;
}

namespace {

struct BumpField {
  long m = 1;
  int d = 1;
  double amplitude = 0.0;                 // c_L * h
  double origin = 0.0;                    // region offset (0 for S_R, 2/3 for S_E)
  const std::vector<int8_t>* signs = nullptr;   // omega (+-1) or null
  const std::vector<uint8_t>* gates = nullptr;  // v (0/1) or null

  // Supports are disjoint, so only the containing cell's bump contributes.
  double eval(std::span<const double> x) const {
    long cell = 0;
    long stride = 1;
    static thread_local std::vector<double> arg;
    arg.assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
      const double u = (x[i] - origin) * 3.0;  // map region to [0,1]
      if (u < 0.0 || u > 1.0) return 0.0;
      const long k = std::min<long>(m - 1, static_cast<long>(u * m));
      const double center = (k + 0.5) / (3.0 * m) + origin;
      arg[i] = m * (x[i] - center);
      cell += k * stride;
      stride *= m;
    }
    const double k_val = bump_kernel(arg);
    if (k_val == 0.0) return 0.0;
    double coef = 1.0;
    if (signs) coef = static_cast<double>((*signs)[cell]);
    if (gates) coef = static_cast<double>((*gates)[cell]);
    return amplitude * coef * k_val;
  }
};

}  // namespace

EnvironmentSpec build_appendix_hard_instance(const HardInstanceParams& params, int d, double beta,
                                             double L) {
  if (d < 1) fail("appendix_hard.d: must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) fail("appendix_hard.beta: must lie in (0, 1]");
  if (!(L > 0.0)) fail("appendix_hard.L: must be positive");
  if (params.kernel != "standard_mollifier")
    fail("appendix_hard.kernel: unknown kernel identifier '" + params.kernel + "'");

  long m = params.m;
  if (m <= 0) {
    if (params.n_for_default_m < 2)
      fail("appendix_hard.m: not set and no horizon given for the default");
    m = static_cast<long>(
        std::ceil(std::pow(static_cast<double>(params.n_for_default_m), 1.0 / (2.0 * beta + d))));
  }
  double cells_d = std::pow(static_cast<double>(m), d);
  if (cells_d > 1e7) fail("appendix_hard.m: m^d too large");
  const long cells = static_cast<long>(std::llround(cells_d));
  if (static_cast<long>(params.omega.size()) != cells)
    fail("appendix_hard.omega: needs exactly m^d entries");
  if (static_cast<long>(params.v.size()) != cells)
    fail("appendix_hard.v: needs exactly m^d entries");
  for (const int8_t s : params.omega)
    if (s != 1 && s != -1) fail("appendix_hard.omega: entries must be +-1");
  for (const uint8_t g : params.v)
    if (g > 1) fail("appendix_hard.v: entries must be 0/1");

  const double h = params.h > 0.0 ? params.h : std::pow(static_cast<double>(m), -beta);
  const double base_e = std::max(0.25, 0.5 - L / std::pow(3.0, beta));
  const double gap_e = 0.5 - base_e;
  if (!(gap_e > 0.0)) fail("appendix_hard.L: estimation region has no gap");

  const double h_kernel = kernel_seminorm(d, beta);
  double c_l = params.c_L > 0.0
                   ? params.c_L
                   : std::min(1.0, L * std::pow(static_cast<double>(m), beta) / h /
                                       (2.0 * h_kernel));
  // Keep bump peaks strictly inside the region gaps.
  while (c_l * h >= gap_e) c_l /= 2.0;

  auto omega = std::make_shared<std::vector<int8_t>>(params.omega);
  auto gates = std::make_shared<std::vector<uint8_t>>(params.v);

  // Shrink until the bump fields alone respect the requested budget: densely
  // scan the first bump row (peak in-cell slope and cross-cell sign flips).
  auto bump_row_ratio = [&](double amplitude) {
    BumpField field{m, d, amplitude, 0.0, omega.get(), nullptr};
    const int pts = 2001;
    const double row_hi = 1.0 / 3.0;
    const auto ts = linspace(0.0, row_hi, pts);
    std::vector<double> vals(pts);
    std::vector<double> x(d);
    for (int i = 1; i < d; ++i) x[i] = 0.5 / (3.0 * m);  // first-cell center line
    for (int i = 0; i < pts; ++i) {
      x[0] = ts[i];
      vals[i] = field.eval(x);
    }
    return scan_profile(ts, vals, beta, L, 1.0);
  };
  for (int iter = 0; iter < 60 && bump_row_ratio(c_l * h) > 1.0 + kHolderSlack; ++iter) c_l /= 2.0;

  const double amplitude = c_l * h;
  BumpField regret_field{m, d, amplitude, 0.0, omega.get(), nullptr};
  BumpField estimation_field{m, d, amplitude, 2.0 / 3.0, nullptr, gates.get()};

  EnvironmentSpec spec;
  spec.d = d;
  spec.beta = beta;
  spec.L = L;
  spec.name = "appendix_hard";
  spec.f0 = [](std::span<const double>) { return 0.5; };
  spec.f1 = [d, base_e, regret_field, estimation_field, omega, gates](std::span<const double> x) {
    double min_coord = x[0];
    bool in_r = true, in_e = true;
    for (int i = 0; i < d; ++i) {
      min_coord = std::min(min_coord, x[i]);
      in_r = in_r && x[i] <= 1.0 / 3.0;
      in_e = in_e && x[i] >= 2.0 / 3.0;
    }
    if (in_r) return 0.5 + regret_field.eval(x);
    if (in_e) return base_e + estimation_field.eval(x);
    return 0.5 + (base_e - 0.5) * smooth_sigma(3.0 * min_coord - 1.0);
  };

  // Certify the declared budget on the assembled surface: diagonal scan
  // (crosses both bump regions and the full transition ramp), first-row axis
  // scan, and seeded random pairs.
  double worst = bump_row_ratio(amplitude);
  {
    const int pts = 2001;
    const auto ts = linspace(0.0, 1.0, pts);
    std::vector<double> vals(pts);
    std::vector<double> x(d);
    for (int i = 0; i < pts; ++i) {
      std::fill(x.begin(), x.end(), ts[i]);
      vals[i] = spec.f1(x);
    }
    worst = std::max(worst, scan_profile(ts, vals, beta, L, std::sqrt(static_cast<double>(d))));
  }
  {
    Rng rng(mix64(0x48415244ull ^ static_cast<uint64_t>(m) ^ (static_cast<uint64_t>(d) << 40)));
    std::vector<double> x(d), y(d);
    for (int p = 0; p < 50000; ++p) {
      for (auto& v : x) v = rng.uniform();
      for (auto& v : y) v = rng.uniform();
      const double dist = pair_distance(x, y);
      if (dist <= 0.0) continue;
      worst = std::max(worst, holder_ratio(spec.f1(x) - spec.f1(y), dist, beta, L));
    }
  }
  spec.L = std::max(L, worst * L * 1.05);
  return spec;
}

}  // namespace conselab
