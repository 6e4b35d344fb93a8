#pragma once
// =============================================================================
// Synthetic environments: two-arm mean-reward surfaces on [0,1]^d with
// bounded noise, plus the constructions used by the experiments
// (separation-band instances, sine surfaces, constant gaps, and the packed
// bump-field hard instances with their Varshamov–Gilbert sign codebooks).
//
// Every builder returns a spec whose declared smoothness budget `L` is large
// enough that the surface it built actually satisfies the (beta, L) Hölder
// condition: if the requested budget is smaller than the certified seminorm
// of the constructed surface, the returned spec carries the certified value
// instead.  The requested budget still parameterizes the construction itself
// (gap sizes, bump amplitudes).
// =============================================================================

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conselab/rng.hpp"

namespace conselab {

enum class NoiseModel : uint8_t {
  kBernoulli,          // reward ~ Bernoulli(f_a(x))
  kTruncatedGaussian,  // reward ~ f_a(x) + sigma * Z, clipped to [0,1]
};

struct EnvironmentSpec {
  int d = 1;
  double beta = 1.0;  // Hölder exponent, (0, 1]
  double L = 1.0;     // declared Hölder budget; surfaces certified against it
  std::function<double(std::span<const double>)> f0;  // control mean
  std::function<double(std::span<const double>)> f1;  // treatment mean
  NoiseModel noise = NoiseModel::kBernoulli;
  double noise_sigma = 0.1;  // used by kTruncatedGaussian only
  std::string name = "custom";
};

// Throws std::invalid_argument naming the offending field.
void validate_spec(const EnvironmentSpec& spec);

// Uniform covariate on [0,1]^d; consumes exactly d uniform draws.
std::vector<double> sample_covariate(const EnvironmentSpec& spec, Rng& rng);

// One reward draw for the given arm; consumes exactly one uniform draw.
double draw_reward(const EnvironmentSpec& spec, std::span<const double> x, int arm, Rng& rng);

// Same distribution as draw_reward, but with the arm mean already evaluated.
// Hot loops use this to avoid re-evaluating the mean surfaces.
double draw_reward_with_mean(const EnvironmentSpec& spec, double mean, Rng& rng);

// Treatment effect f1(x) - f0(x).
double cate(const EnvironmentSpec& spec, std::span<const double> x);

// -----------------------------------------------------------------------------
// Smoothness certification
// -----------------------------------------------------------------------------

struct HolderReport {
  double max_ratio = 0.0;  // max over sampled pairs and both arms of
                           // |f_a(x) - f_a(x')| / (L * ||x - x'||^beta)
  bool pass = true;        // max_ratio <= 1 + 1e-9
};

// Monte-Carlo certification of the declared (beta, L) budget over
// `pair_count` uniform pairs.
HolderReport holder_check(const EnvironmentSpec& spec, long pair_count, Rng& rng);

// -----------------------------------------------------------------------------
// Instance builders
// -----------------------------------------------------------------------------

// Two constant arms split by a smooth band at x_1 = 1/2: treatment leads by a
// shrinking margin delta on the left and trails by a fixed constant gap on
// the right, joined by a cubic smoothstep over a band whose width keeps the
// surface within the smoothness budget used for the construction.
// `small_gap_override`, when set, replaces the default margin n^(-beta/(2beta+d)).
// Rejects overrides exceeding the fixed right-side gap.
EnvironmentSpec build_mixed_gap_instance(int d, double beta, double L, long n,
                                         std::optional<double> small_gap_override = std::nullopt);

// f0 = 1/2, f1 = 1/2 + 0.2 sin(2 pi x_1): smooth effect with sign changes.
EnvironmentSpec build_smooth_sine_instance(int d, double beta, double L);

// Constant arms with f1 - f0 = g everywhere, centered on 1/2.  |g| <= 1.
EnvironmentSpec build_constant_gap_instance(int d, double beta, double L, double g);

// Compactly supported product mollifier bump.  Support is ||u||_inf < 1/12,
// peak value 1 at the origin, even in every coordinate.
double bump_kernel(std::span<const double> u);

struct Codebook {
  int word_length = 0;   // N
  int min_distance = 0;  // pairwise Hamming distance lower bound
  std::vector<std::vector<uint8_t>> words;
};

// Greedy Varshamov–Gilbert codebook over {0,1}^N with pairwise Hamming
// distance >= min_distance.  For N <= 16 the greedy pass visits every word in
// a shuffled order (maximal greedy codebook); for larger N it samples
// candidates until 2^ceil(N/8) words are found.  Reports failure if fewer
// than two words can be found.
Codebook vg_codebook(int N, int min_distance, Rng& rng);

struct HardInstanceParams {
  long m = 0;                   // bumps per axis; 0 = default ceil(n^(1/(2beta+d)))
  long n_for_default_m = 0;     // horizon used when m == 0
  double h = -1.0;              // bump amplitude; < 0 = default m^(-beta)
  double c_L = -1.0;            // amplitude safety factor; < 0 = calibrated
  std::vector<int8_t> omega;    // signs in {-1,+1}, one per bump cell (m^d)
  std::vector<uint8_t> v;       // codebook word in {0,1}, one per bump cell
  std::string kernel = "standard_mollifier";
};

// Packed bump-field construction: a regret-critical region [0,1/3]^d of
// sign-coded bumps around level 1/2, an estimation-critical region [2/3,1]^d
// of codeword bumps around a depressed level, and a smooth monotone
// transition elsewhere driven by min_i x_i.
EnvironmentSpec build_appendix_hard_instance(const HardInstanceParams& params, int d, double beta,
                                             double L);

// Kernel Hölder seminorm estimate used to calibrate bump amplitudes; cached
// per (d, beta) after a one-time randomized estimate over 1e5 pairs.
double kernel_seminorm(int d, double beta);

}  // namespace conselab
