#pragma once

// Statistical checks around the sampling identity: binned conditional-mean
// regressions against the diagonal, beta-law KS tests for occupation times,
// exchangeability chi-square tests on category tuples, the two-point
// counterexample, weight-function discrepancies, and the endpoint surface
// f(t, a) = P(driving path positive at t | total positive time = a).

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "occlab/parallel.hpp"
#include "occlab/path_engine.hpp"
#include "occlab/stats.hpp"

namespace occlab {

struct BetaLaw {
  double a = 1.0;
  double b = 1.0;
};

// CDF of BetaLaw; domain error outside [0,1].
double beta_law_cdf(const BetaLaw& law, double x);

// Extended verdict: `inconclusive` marks runs that could not decide (too few
// samples in every bin), which is distinct from failing.
struct CheckVerdict : TestVerdict {
  bool inconclusive = false;
};

// One replica's contribution to a conditional-mean regression: the measured
// mass of the probe set and whether the endpoint landed in it.
struct MassEndpoint {
  double mass = 0.0;
  double hit = 0.0;
};
using MassEndpointSampler = std::function<MassEndpoint(Rng&)>;

struct SamplingIdentityResult {
  CheckVerdict verdict;
  BinnedCurve curve;
  std::uint64_t qualifying_bins = 0;
};

// Binned conditional mean of `hit` given `mass`, compared to the diagonal.
// Statistic: max over bins with >= min_bin_count samples of
// (|mean - center| - 3 SE); passes when <= allowance. No qualifying bins ->
// inconclusive.
SamplingIdentityResult sampling_identity_check(const MassEndpointSampler& sampler,
                                               std::uint64_t n_paths, std::size_t n_bins,
                                               std::uint64_t seed, const ExecPolicy& policy,
                                               double allowance,
                                               std::uint64_t min_bin_count = 100);

struct LevyBetaResult {
  double positivity = 0.5;
  CheckVerdict unconditional;    // V_1 vs beta(p, 1-p)
  CheckVerdict given_positive;   // V_1 | Y_1 > 0 vs beta(1+p, 1-p)
  CheckVerdict given_negative;   // V_1 | Y_1 < 0 vs beta(p, 2-p)
};

LevyBetaResult levy_beta_conditionals(double alpha, double beta_skew, std::uint64_t n_paths,
                                      std::uint32_t n_steps, std::uint64_t seed,
                                      const ExecPolicy& policy, double ks_threshold_uncond = 0.02,
                                      double ks_threshold_cond = 0.03);

struct PerturbedBetaResult {
  CheckVerdict time_below;       // V_1^- vs beta(1/2, 1/(2 mu))
  CheckVerdict given_negative;   // V_1^- | Y_1 < 0 vs beta(3/2, 1/(2 mu))
  CheckVerdict given_positive;   // V_1^- | Y_1 > 0 vs beta(1/2, 1 + 1/(2 mu))
};

PerturbedBetaResult perturbed_beta_check(double mu, std::uint64_t n_paths, std::uint32_t n_steps,
                                         std::uint64_t seed, const ExecPolicy& policy,
                                         double ks_threshold = 0.02,
                                         double ks_threshold_cond = 0.03);

struct ConverseExampleResult {
  double exact_end_vs_uniform = 0.0;      // P(Theta_1 = Theta_{U_2}) = 1 - a
  double exact_uniform_pair = 0.0;        // P(Theta_{U_1} = Theta_{U_2}) = a^2 + (1-a)^2
  double empirical_end_vs_uniform = 0.0;
  double empirical_uniform_pair = 0.0;
  double se_end_vs_uniform = 0.0;
  double se_uniform_pair = 0.0;
  CheckVerdict verdict;  // both empirical values within 3 SE of exact
};

// Two-valued process X on [0,a), Y = -X on [a,1] with X a fair sign; the pair
// (X, Y) is symmetric with P(X = Y) = 0.
ConverseExampleResult converse_example_stats(double a, std::uint64_t n_samples,
                                             std::uint64_t seed, const ExecPolicy& policy);

// Categorical process sampled at t = 1 and at i.i.d. uniform times.
struct CategoricalProcessSampler {
  int n_categories = 0;
  // Fills out[0..n-1]: when endpoint_first, out[0] is the category at t = 1
  // and the rest sit at independent uniforms; otherwise all at uniforms.
  std::function<void(Rng&, bool endpoint_first, int n, std::uint32_t* out)> draw;
};

struct ExchangeabilityResult {
  ChiSquareResult chi;
  CheckVerdict non_rejection;  // passes when the test does NOT reject at `level`
};

// Two-sample chi-square between the laws of (Theta_1, Theta_{U_2}, ...) and
// (Theta_{U_1}, ..., Theta_{U_n}) over k^n cells, using independent batches.
ExchangeabilityResult exchangeability_chi_square(const CategoricalProcessSampler& sampler,
                                                 int tuple_size, std::uint64_t n_samples,
                                                 std::uint64_t seed, const ExecPolicy& policy,
                                                 double level = 0.01,
                                                 std::uint64_t cell_budget = 4096);

struct WeightLaw {
  enum class Kind { kDelta0, kExponential, kUniform01 };
  Kind kind = Kind::kDelta0;
  double lambda = 1.0;  // rate, for the exponential case
};

struct Discrepancy {
  double value = 0.0;
  double std_error = 0.0;  // 0 for closed forms
};

// Delta = E exp(-alpha |xi_1|) - E exp(-alpha |xi_1 - xi_2|), xi_i i.i.d. ~ F.
// Closed forms for the supported laws.
Discrepancy stationary_weight_discrepancy(const WeightLaw& law, double alpha);

// Monte Carlo variant for arbitrary sampleable laws.
Discrepancy stationary_weight_discrepancy_mc(const std::function<double(Rng&)>& sample,
                                             double alpha, std::uint64_t n, std::uint64_t seed,
                                             const ExecPolicy& policy);

// Weight function on [0,1] for the power-weight identity: distribution
// function F with density lambda x^{lambda-1}, or a uniform density on
// [1/2, 1] as the non-power control.
struct TimeWeight {
  enum class Kind { kPower, kUniformHalfOne } kind = Kind::kPower;
  double lambda = 1.0;
  double cdf(double t) const;
};

// Regression of the endpoint indicator on the F-weighted occupation of the
// positive half-line for one-dimensional BM. Power weights should track the
// diagonal; the non-power control should not.
SamplingIdentityResult power_weight_identity_check(const TimeWeight& weight,
                                                   std::uint64_t n_paths, std::uint32_t n_steps,
                                                   std::size_t n_bins, std::uint64_t seed,
                                                   const ExecPolicy& policy, double allowance);

struct EndpointSurface {
  std::vector<double> t_values;
  std::size_t n_a_bins = 0;
  std::vector<std::uint64_t> bin_count;       // per a-bin
  std::vector<double> f_hat;                  // n_a_bins * t_values.size()
  std::vector<double> integral_check;         // mean V_1 per a-bin == integral of f over the grid
  CheckVerdict integral_verdict;              // (i): |mean V_1 - bin mean a| small, central bins
  CheckVerdict endpoint_verdict;              // (ii): f(1, a) tracks a
  CheckVerdict small_t_verdict;               // (iii): f(t_min, a) near 1/2 for central bins
  CheckVerdict bump_verdict;                  // (iv): exists t < 1 with f(t, a) > a + 3 SE, a ~ 0.75
  double value(std::size_t a_bin, std::size_t t_idx) const {
    return f_hat[a_bin * t_values.size() + t_idx];
  }
};

EndpointSurface endpoint_surface_f(std::uint64_t n_paths, std::uint32_t n_steps,
                                   std::vector<double> t_grid, std::size_t a_bins,
                                   std::uint64_t seed, const ExecPolicy& policy);

// Walsh sampler over a discrete angle law, for exchangeability tests.
CategoricalProcessSampler walsh_categorical_sampler(const TimeGrid& grid,
                                                    std::vector<double> angle_atoms,
                                                    std::vector<double> angle_probs);

// The two-point switch process as a categorical sampler (categories: sign).
CategoricalProcessSampler converse_categorical_sampler(double a);

}  // namespace occlab
