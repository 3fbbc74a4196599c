#include "occlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "occlab/cover.hpp"
#include "occlab/errors.hpp"
#include "occlab/geom.hpp"
#include "occlab/occupation.hpp"
#include "occlab/parallel.hpp"
#include "occlab/path_engine.hpp"
#include "occlab/quadrant.hpp"
#include "occlab/recovery.hpp"
#include "occlab/rng.hpp"
#include "occlab/sampling_laws.hpp"
#include "occlab/set_topology.hpp"
#include "occlab/stats.hpp"

namespace occlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckVerdict lift(const TestVerdict& v, bool inconclusive = false) {
  CheckVerdict c;
  static_cast<TestVerdict&>(c) = v;
  c.inconclusive = inconclusive;
  if (inconclusive) c.passed = false;
  return c;
}

CheckVerdict renamed(CheckVerdict v, std::string name) {
  v.name = std::move(name);
  return v;
}

// Controls are expected to fail their underlying check; flipping the margin
// keeps the uniform "statistic <= threshold passes" convention.
CheckVerdict expect_reject(CheckVerdict v, std::string name) {
  v.name = std::move(name);
  v.statistic = v.threshold - v.statistic;
  v.threshold = 0.0;
  v.passed = !v.inconclusive && v.statistic <= 0.0;
  return v;
}

CsvTable verdict_table(const std::vector<CheckVerdict>& vs) {
  CsvTable t;
  t.header = {"name", "statistic", "threshold", "n_samples", "passed", "inconclusive"};
  for (const auto& v : vs) {
    t.push_row({v.name, fmt_double(v.statistic), fmt_double(v.threshold),
                std::to_string(v.n_samples), v.passed ? "1" : "0", v.inconclusive ? "1" : "0"});
  }
  return t;
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return kInf;
  const std::size_t n = xs.size();
  std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
  const double hi = xs[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + n / 2);
  return 0.5 * (lo + hi);
}

std::uint32_t config_steps(const Config& cfg, const std::string& key) {
  const int v = config_int(cfg, key, 0);
  if (v <= 0) throw ConfigError(key + " must be a positive integer");
  return static_cast<std::uint32_t>(v);
}

std::vector<int> config_int_list(const Config& cfg, const std::string& key,
                                 std::vector<double> fallback) {
  std::vector<int> out;
  for (double x : config_double_list(cfg, key, std::move(fallback))) {
    out.push_back(static_cast<int>(std::llround(x)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// sampling-identity

ExperimentOutcome run_sampling_identity(const Config& cfg, std::uint64_t seed,
                                        const ExecPolicy& policy) {
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const auto n_bins = static_cast<std::size_t>(config_int(cfg, "n_bins", 20));
  const double allowance = config_double(cfg, "allowance", 0.02);
  const std::uint64_t min_bin = config_u64(cfg, "min_bin_count", 100);

  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const MassEndpointSampler sampler = [grid, n_steps](Rng& rng) {
    BrownianWalker walker(1, grid, rng);
    double w = 0.0;
    std::uint32_t above = 0;
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      if (w > 0.0) ++above;
      walker.step(&w);
    }
    return MassEndpoint{static_cast<double>(above) / static_cast<double>(n_steps),
                        w > 0.0 ? 1.0 : 0.0};
  };
  const SamplingIdentityResult res =
      sampling_identity_check(sampler, n_paths, n_bins, seed, policy, allowance, min_bin);

  ExperimentOutcome out;
  out.verdicts.push_back(renamed(res.verdict, "diagonal-regression"));
  out.summary["qualifying_bins"] = res.qualifying_bins;
  CsvTable t;
  t.header = {"bin_center", "count", "mean_hit", "std_error"};
  for (std::size_t i = 0; i < res.curve.n_bins(); ++i) {
    t.push_row({fmt_double(res.curve.bin_center(i)), std::to_string(res.curve.count(i)),
                fmt_double(res.curve.mean(i)), fmt_double(res.curve.std_error(i))});
  }
  out.tables.emplace_back("diagonal", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// beta-laws

ExperimentOutcome run_beta_laws(const Config& cfg, std::uint64_t seed, const ExecPolicy& policy) {
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const double alpha = config_double(cfg, "alpha", 2.0);
  const double beta_skew = config_double(cfg, "beta_skew", 0.0);
  const double ks_uncond = config_double(cfg, "ks_unconditional", 0.02);
  const double ks_cond = config_double(cfg, "ks_conditional", 0.03);

  const LevyBetaResult res =
      levy_beta_conditionals(alpha, beta_skew, n_paths, n_steps, seed, policy, ks_uncond, ks_cond);

  ExperimentOutcome out;
  out.verdicts.push_back(renamed(res.unconditional, "ks-occupation-unconditional"));
  out.verdicts.push_back(renamed(res.given_positive, "ks-occupation-given-positive"));
  out.verdicts.push_back(renamed(res.given_negative, "ks-occupation-given-negative"));
  out.summary["positivity"] = res.positivity;
  out.summary["positivity_exact"] = stable_positivity(alpha, beta_skew);
  return out;
}

// ---------------------------------------------------------------------------
// perturbed

ExperimentOutcome run_perturbed(const Config& cfg, std::uint64_t seed, const ExecPolicy& policy) {
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const double ks_uncond = config_double(cfg, "ks_unconditional", 0.02);
  const double ks_cond = config_double(cfg, "ks_conditional", 0.03);
  const std::vector<double> mus = config_double_list(cfg, "mu_list", {0.5, 1.0});

  ExperimentOutcome out;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const double mu = mus[i];
    const PerturbedBetaResult res = perturbed_beta_check(mu, n_paths, n_steps,
                                                         derive_seed(seed, 1 + i), policy,
                                                         ks_uncond, ks_cond);
    const std::string tag = "[mu=" + fmt_double(mu) + "]";
    out.verdicts.push_back(renamed(res.time_below, "ks-time-below" + tag));
    out.verdicts.push_back(renamed(res.given_negative, "ks-given-negative" + tag));
    out.verdicts.push_back(renamed(res.given_positive, "ks-given-positive" + tag));
  }
  out.summary["mu_list"] = mus;
  return out;
}

// ---------------------------------------------------------------------------
// exchangeability

ExperimentOutcome run_exchangeability(const Config& cfg, std::uint64_t seed,
                                      const ExecPolicy& policy) {
  const std::uint64_t n_samples = config_u64(cfg, "n_samples", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const double level = config_double(cfg, "level", 0.01);
  const double converse_a = config_double(cfg, "converse_a", 1.0 / 3.0);
  const std::uint64_t cell_budget = config_u64(cfg, "cell_budget", 4096);
  const std::vector<double> atoms = config_double_list(cfg, "angle_atoms", {0.5, 2.0, 4.0});
  const std::vector<double> probs = config_double_list(cfg, "angle_probs", {0.5, 0.3, 0.2});
  const std::vector<int> tuples = config_int_list(cfg, "tuple_sizes", {2.0, 3.0});

  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const CategoricalProcessSampler walsh = walsh_categorical_sampler(grid, atoms, probs);

  ExperimentOutcome out;
  CsvTable chi;
  chi.header = {"test", "tuple_size", "statistic", "df", "p_value"};
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const int n = tuples[i];
    const ExchangeabilityResult res = exchangeability_chi_square(
        walsh, n, n_samples, derive_seed(seed, 0x10 + i), policy, level, cell_budget);
    out.verdicts.push_back(
        renamed(res.non_rejection, "walsh-tuples-exchangeable[n=" + std::to_string(n) + "]"));
    chi.push_row({"walsh", std::to_string(n), fmt_double(res.chi.statistic),
                  fmt_double(res.chi.df), fmt_double(res.chi.p_value)});
  }
  const CategoricalProcessSampler control = converse_categorical_sampler(converse_a);
  const ExchangeabilityResult res = exchangeability_chi_square(
      control, 2, n_samples, derive_seed(seed, 0x20), policy, level, cell_budget);
  out.verdicts.push_back(expect_reject(res.non_rejection, "switch-control-rejects"));
  chi.push_row({"switch-control", "2", fmt_double(res.chi.statistic), fmt_double(res.chi.df),
                fmt_double(res.chi.p_value)});
  out.tables.emplace_back("chi_square", std::move(chi));
  return out;
}

// ---------------------------------------------------------------------------
// converse-example

ExperimentOutcome run_converse_example(const Config& cfg, std::uint64_t seed,
                                       const ExecPolicy& policy) {
  const double a = config_double(cfg, "a", 1.0 / 3.0);
  const std::uint64_t n_samples = config_u64(cfg, "n_samples", 0);

  const ConverseExampleResult res = converse_example_stats(a, n_samples, seed, policy);

  ExperimentOutcome out;
  out.verdicts.push_back(renamed(res.verdict, "exact-pair-match"));
  out.summary["exact_end_vs_uniform"] = res.exact_end_vs_uniform;
  out.summary["exact_uniform_pair"] = res.exact_uniform_pair;
  CsvTable t;
  t.header = {"quantity", "exact", "empirical", "std_error"};
  t.push_row({"end_vs_uniform", fmt_double(res.exact_end_vs_uniform),
              fmt_double(res.empirical_end_vs_uniform), fmt_double(res.se_end_vs_uniform)});
  t.push_row({"uniform_pair", fmt_double(res.exact_uniform_pair),
              fmt_double(res.empirical_uniform_pair), fmt_double(res.se_uniform_pair)});
  out.tables.emplace_back("moments", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// weight-characterization

ExperimentOutcome run_weight_characterization(const Config& cfg, std::uint64_t seed,
                                              const ExecPolicy& policy) {
  const std::vector<double> alphas = config_double_list(cfg, "alpha_list", {0.5, 1.0, 2.0});
  const double lambda = config_double(cfg, "lambda", 1.0);
  const std::uint64_t mc_samples = config_u64(cfg, "mc_samples", 200000);
  const std::vector<double> power_lambdas = config_double_list(cfg, "power_lambdas", {1.0, 2.0});
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const auto n_bins = static_cast<std::size_t>(config_int(cfg, "n_bins", 20));
  const double allowance = config_double(cfg, "allowance", 0.02);

  ExperimentOutcome out;
  CsvTable disc;
  disc.header = {"alpha", "law", "closed_value", "mc_value", "mc_std_error"};

  double worst_d0 = 0.0, worst_exp = 0.0, min_unif = kInf, worst_mc = -kInf;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double alpha = alphas[i];
    const Discrepancy d0 = stationary_weight_discrepancy({WeightLaw::Kind::kDelta0, 0.0}, alpha);
    const Discrepancy de =
        stationary_weight_discrepancy({WeightLaw::Kind::kExponential, lambda}, alpha);
    const Discrepancy du = stationary_weight_discrepancy({WeightLaw::Kind::kUniform01, 0.0}, alpha);
    worst_d0 = std::max(worst_d0, std::abs(d0.value));
    worst_exp = std::max(worst_exp, std::abs(de.value));
    min_unif = std::min(min_unif, std::abs(du.value));

    const Discrepancy mc_e = stationary_weight_discrepancy_mc(
        [lambda](Rng& rng) { return rng.exponential() / lambda; }, alpha, mc_samples,
        derive_seed(seed, 0x30 + i), policy);
    const Discrepancy mc_u = stationary_weight_discrepancy_mc(
        [](Rng& rng) { return rng.uniform(); }, alpha, mc_samples, derive_seed(seed, 0x40 + i),
        policy);
    worst_mc = std::max(worst_mc, std::abs(mc_e.value - de.value) - 4.0 * mc_e.std_error);
    worst_mc = std::max(worst_mc, std::abs(mc_u.value - du.value) - 4.0 * mc_u.std_error);

    disc.push_row({fmt_double(alpha), "delta0", fmt_double(d0.value), "", ""});
    disc.push_row({fmt_double(alpha), "exponential", fmt_double(de.value),
                   fmt_double(mc_e.value), fmt_double(mc_e.std_error)});
    disc.push_row({fmt_double(alpha), "uniform01", fmt_double(du.value), fmt_double(mc_u.value),
                   fmt_double(mc_u.std_error)});
  }
  const auto n_alpha = static_cast<std::uint64_t>(alphas.size());
  out.verdicts.push_back(lift(make_verdict("degenerate-weight-zero", worst_d0, 1e-12, n_alpha)));
  out.verdicts.push_back(lift(make_verdict("exponential-weight-zero", worst_exp, 1e-12, n_alpha)));
  out.verdicts.push_back(
      lift(make_verdict("uniform-weight-nonzero", 0.01 - min_unif, 0.0, n_alpha)));
  out.verdicts.push_back(
      lift(make_verdict("mc-matches-closed-form", worst_mc, 0.0, mc_samples)));

  for (std::size_t i = 0; i < power_lambdas.size(); ++i) {
    const double lp = power_lambdas[i];
    TimeWeight w;
    w.kind = TimeWeight::Kind::kPower;
    w.lambda = lp;
    const SamplingIdentityResult res = power_weight_identity_check(
        w, n_paths, n_steps, n_bins, derive_seed(seed, 0x50 + i), policy, allowance);
    out.verdicts.push_back(
        renamed(res.verdict, "power-weight-diagonal[lambda=" + fmt_double(lp) + "]"));
  }
  TimeWeight ctl;
  ctl.kind = TimeWeight::Kind::kUniformHalfOne;
  const SamplingIdentityResult control = power_weight_identity_check(
      ctl, n_paths, n_steps, n_bins, derive_seed(seed, 0x60), policy, allowance);
  out.verdicts.push_back(expect_reject(control.verdict, "non-power-control-deviates"));

  out.tables.emplace_back("discrepancies", std::move(disc));
  return out;
}

// ---------------------------------------------------------------------------
// levmore-surface

ExperimentOutcome run_levmore_surface(const Config& cfg, std::uint64_t seed,
                                      const ExecPolicy& policy) {
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const auto a_bins = static_cast<std::size_t>(config_int(cfg, "a_bins", 20));
  const std::vector<double> t_grid = config_double_list(cfg, "t_grid", {});
  if (t_grid.empty()) throw ConfigError("t_grid must be nonempty");

  const EndpointSurface res = endpoint_surface_f(n_paths, n_steps, t_grid, a_bins, seed, policy);

  ExperimentOutcome out;
  out.verdicts.push_back(lift(res.integral_verdict));
  out.verdicts.push_back(lift(res.endpoint_verdict));
  out.verdicts.push_back(lift(res.small_t_verdict));
  out.verdicts.push_back(lift(res.bump_verdict));
  out.summary["t_grid"] = res.t_values;

  CsvTable t;
  t.header = {"a_bin_center", "count", "mean_occupation"};
  for (double tv : res.t_values) t.header.push_back("f_t=" + fmt_double(tv));
  for (std::size_t b = 0; b < res.n_a_bins; ++b) {
    std::vector<std::string> row = {fmt_double((static_cast<double>(b) + 0.5) /
                                               static_cast<double>(res.n_a_bins)),
                                    std::to_string(res.bin_count[b]),
                                    fmt_double(res.integral_check[b])};
    for (std::size_t i = 0; i < res.t_values.size(); ++i) {
      row.push_back(fmt_double(res.value(b, i)));
    }
    t.push_row(std::move(row));
  }
  out.tables.emplace_back("surface", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// quadrant (single window + exact minimum laws)

CsvTable quadrant_table_header() {
  CsvTable t;
  t.header = {"epsilon", "n_paths", "p_A_hat", "p_joint_hat", "cond_hat",
              "wilson_lo", "wilson_hi", "mean_muQ3_given_A"};
  return t;
}

void push_quadrant_row(CsvTable& t, const QuadrantTrialResult& trial, double p_joint) {
  const Interval wil = trial.conditional_q3_wilson();
  t.push_row({fmt_double(trial.epsilon), std::to_string(trial.n_paths),
              fmt_double(trial.p_hit()), fmt_double(p_joint), fmt_double(trial.conditional_q3()),
              fmt_double(wil.lo), fmt_double(wil.hi), fmt_double(trial.mean_mass_q3_given_hit())});
}

void append_conditional_verdicts(std::vector<CheckVerdict>& verdicts,
                                 const QuadrantTrialResult& trial, std::uint64_t min_hits) {
  const bool thin = trial.hits < min_hits;
  const Interval wil = trial.conditional_q3_wilson();
  verdicts.push_back(lift(
      make_verdict("endpoint-conditional-below-epsilon", wil.hi - trial.epsilon, 0.0, trial.hits),
      thin));
  verdicts.push_back(lift(make_verdict("endpoint-conditional-below-mean-mass",
                                       wil.hi - trial.mean_mass_q3_given_hit(), 0.0, trial.hits),
                          thin));
  const double h = static_cast<double>(trial.hits);
  const double p2 = trial.hits == 0 ? 0.0 : static_cast<double>(trial.endpoint_q2) / h;
  const double p4 = trial.hits == 0 ? 0.0 : static_cast<double>(trial.endpoint_q4) / h;
  const double se =
      trial.hits == 0 ? 0.0 : std::sqrt((p2 * (1.0 - p2) + p4 * (1.0 - p4)) / h);
  verdicts.push_back(lift(
      make_verdict("endpoint-q2-q4-symmetry", std::abs(p2 - p4) - 3.0 * se, 0.0, trial.hits),
      thin));
}

ExperimentOutcome run_quadrant(const Config& cfg, std::uint64_t seed, const ExecPolicy& policy) {
  const double epsilon = config_double(cfg, "epsilon", 0.05);
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const std::uint64_t min_hits = config_u64(cfg, "min_hits", 100);
  const std::vector<double> min_deltas = config_double_list(cfg, "min_deltas", {0.05, 0.1, 0.2});
  const std::uint64_t min_n_paths = config_u64(cfg, "min_n_paths", 200000);
  const std::uint32_t min_n_steps = config_steps(cfg, "min_n_steps");

  ExperimentOutcome out;
  const QuadrantTrialResult trial =
      run_quadrant_trial(epsilon, n_paths, n_steps, derive_seed(seed, 1), policy);
  append_conditional_verdicts(out.verdicts, trial, min_hits);

  CsvTable tt = quadrant_table_header();
  push_quadrant_row(tt, trial, static_cast<double>(trial.joint_q3) / static_cast<double>(n_paths));
  out.tables.emplace_back("trial", std::move(tt));
  out.summary["hits"] = trial.hits;
  out.summary["joint_q3"] = trial.joint_q3;

  const MinLawCheck mlc =
      min_law_mc_check(min_deltas, min_n_paths, min_n_steps, derive_seed(seed, 2), policy);
  out.verdicts.push_back(renamed(lift(mlc.verdict), "grid-minimum-laws"));
  double worst_bias = -kInf;
  CsvTable ml;
  ml.header = {"delta", "exact_first", "empirical_first", "se_first",
               "exact_second", "empirical_second", "se_second"};
  for (const MinLawCheckRow& row : mlc.rows) {
    worst_bias = std::max(worst_bias, row.exact_first - row.se_first - row.empirical_first);
    ml.push_row({fmt_double(row.delta), fmt_double(row.exact_first),
                 fmt_double(row.empirical_first), fmt_double(row.se_first),
                 fmt_double(row.exact_second), fmt_double(row.empirical_second),
                 fmt_double(row.se_second)});
  }
  out.verdicts.push_back(
      lift(make_verdict("discrete-minimum-bias-direction", worst_bias, 0.0, min_n_paths)));
  out.tables.emplace_back("minimum_laws", std::move(ml));

  // Small-delta limits of the closed forms themselves.
  const auto [first_small, second_unused] = min_law_exact(0.001);
  (void)second_unused;
  const double rel_first = std::abs(first_small / 0.001 / std::sqrt(2.0 / std::numbers::pi) - 1.0);
  out.verdicts.push_back(lift(make_verdict("minimum-law-first-order-limit", rel_first, 0.005, 1)));
  const auto [first_unused, second_small] = min_law_exact(0.01);
  (void)first_unused;
  const double rel_second =
      std::abs(second_small / 1e-6 / (1.0 / std::sqrt(2.0 * std::numbers::pi)) - 1.0);
  out.verdicts.push_back(
      lift(make_verdict("minimum-law-third-order-limit", rel_second, 0.02, 1)));
  return out;
}

// ---------------------------------------------------------------------------
// quadrant-scan

ExperimentOutcome run_quadrant_scan(const Config& cfg, std::uint64_t seed,
                                    const ExecPolicy& policy) {
  const std::vector<double> epsilons = config_double_list(
      cfg, "epsilons", {0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1});
  const double epsilon_star = config_double(cfg, "epsilon_star", 0.05);
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const std::uint64_t min_hits = config_u64(cfg, "min_hits", 50);

  const ScalingScan scan = scaling_scan(epsilons, n_paths, n_steps, derive_seed(seed, 1), policy);

  ExperimentOutcome out;
  CsvTable t = quadrant_table_header();
  double worst_ratio = -kInf;
  bool any_empty = false;
  int joint_rows = 0;
  std::vector<double> eps_axis, cond_axis;
  for (const ScalingScanRow& row : scan.rows) {
    push_quadrant_row(t, row.trial, row.p_joint);
    if (row.trial.hits == 0) {
      any_empty = true;
    } else {
      const double ratio = row.trial.p_hit() / row.trial.epsilon;
      worst_ratio = std::max(worst_ratio, std::max(0.01 - ratio, ratio - 10.0));
      eps_axis.push_back(row.trial.epsilon);
      cond_axis.push_back(row.trial.conditional_q3());
    }
    if (row.trial.joint_q3 > 0) ++joint_rows;
    if (std::abs(row.trial.epsilon - epsilon_star) < 1e-12) {
      append_conditional_verdicts(out.verdicts, row.trial, min_hits);
    }
  }
  out.verdicts.push_back(lift(
      make_verdict("hit-rate-order-epsilon", any_empty ? kInf : worst_ratio, 0.0, n_paths),
      any_empty));
  out.verdicts.push_back(lift(
      make_verdict("joint-slope-at-least-two", 2.0 - scan.slope_joint, 0.0, n_paths),
      joint_rows < 3));

  out.summary["slope_hit"] = scan.slope_hit;
  out.summary["slope_joint"] = scan.slope_joint;
  out.summary["slope_hit_logcorr"] = scan.slope_hit_logcorr;
  out.summary["slope_joint_logcorr"] = scan.slope_joint_logcorr;
  if (eps_axis.size() >= 3) {
    out.summary["conditional_trend_spearman"] = spearman_rho(eps_axis, cond_axis);
  }
  out.tables.emplace_back("scan", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// recovery-d3

ExperimentOutcome run_recovery_d3(const Config& cfg, std::uint64_t seed,
                                  const ExecPolicy& policy) {
  const std::uint64_t n_paths = config_u64(cfg, "n_paths", 0);
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const int j_max = config_int(cfg, "j_max", 5);
  const std::vector<int> j_range = config_int_list(cfg, "j_range", {2.0, 3.0, 4.0});
  const double limsup_tol = config_double(cfg, "limsup_tol", 0.15);
  const std::vector<double> schedule =
      config_double_list(cfg, "delta_schedule", {0.5, 0.25, 0.125});
  const int phi_level = config_int(cfg, "phi_level", 3);
  const double gap_mult = config_double(cfg, "gap_tol_mult", 2.0);
  const double kappa = config_double(cfg, "kappa", 1.0);
  const double hausdorff_median_max = config_double(cfg, "hausdorff_median_max", 0.25);
  const double endpoint_tol = config_double(cfg, "endpoint_tol", 0.15);
  const double endpoint_frac_min = config_double(cfg, "endpoint_frac_min", 0.6);
  const double oracle_tol = config_double(cfg, "oracle_tol", 0.05);
  const double oracle_frac_min = config_double(cfg, "oracle_frac_min", 0.9);
  if (n_paths == 0) throw ConfigError("n_paths must be positive");

  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const CoverHierarchy cover = build_cover(3, j_max);
  PsiParams psi_params;
  psi_params.j_range = j_range;
  psi_params.limsup_tol = limsup_tol;
  psi_params.kappa_highd = kappa;
  EndpointParams ep_params;
  ep_params.delta_schedule = schedule;
  ep_params.phi_level = phi_level;

  const auto n = static_cast<std::size_t>(n_paths);
  std::vector<double> h_norm(n, kInf), ep_norm(n, kInf), or_norm(n, kInf), diam(n, 0.0);
  std::vector<std::uint8_t> psi_flag(n, 0), or_flag(n, 0);
  std::vector<std::uint64_t> psi_points(n, 0), cand_count(n, 0);

  replica_for(n_paths, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{derive_seed(seed, 0xA1), r});
    const SamplePath path = simulate_bm(3, grid, rng);
    const SpherePath sphere = spherical_project(path, default_zero_convention(3));
    const OccupationMeasure mu = occupation_measure(sphere);
    const PointCloud truth = cloud_from_path(path);
    const std::vector<double> true_end = {path.coord(n_steps, 0), path.coord(n_steps, 1),
                                          path.coord(n_steps, 2)};

    RecoveryReport report = recover_endpoint(mu, cover, psi_params, ep_params);
    evaluate_against_truth(report, truth, true_end);
    const std::size_t i = static_cast<std::size_t>(r);
    diam[i] = report.truth_diameter;
    psi_flag[i] = report.inconclusive ? 1 : 0;
    psi_points[i] = report.psi_cloud.n();
    cand_count[i] = report.n_candidates;
    if (report.hausdorff_to_truth >= 0.0 && report.truth_diameter > 0.0) {
      h_norm[i] = report.hausdorff_to_truth / report.truth_diameter;
    }
    if (report.endpoint_error >= 0.0 && report.truth_diameter > 0.0) {
      ep_norm[i] = report.endpoint_error / report.truth_diameter;
    }

    const double gap_tol = gap_mult * truth.resolution;
    RecoveryReport oracle = recover_endpoint_oracle(path, gap_tol, ep_params);
    evaluate_against_truth(oracle, truth, true_end);
    or_flag[i] = oracle.inconclusive ? 1 : 0;
    if (oracle.endpoint_error >= 0.0 && oracle.truth_diameter > 0.0) {
      or_norm[i] = oracle.endpoint_error / oracle.truth_diameter;
    }
  });

  const double med_h = median_of(h_norm);
  auto frac_below = [&](const std::vector<double>& xs, double tol) {
    std::size_t c = 0;
    for (double x : xs) c += x < tol ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(xs.size());
  };
  const double ep_frac = frac_below(ep_norm, endpoint_tol);
  const double or_frac = frac_below(or_norm, oracle_tol);

  ExperimentOutcome out;
  out.verdicts.push_back(lift(
      make_verdict("median-range-hausdorff", med_h, hausdorff_median_max, n_paths),
      !(med_h < kInf)));
  out.verdicts.push_back(
      lift(make_verdict("endpoint-within-tolerance", endpoint_frac_min - ep_frac, 0.0, n_paths)));
  out.verdicts.push_back(
      lift(make_verdict("oracle-endpoint-within-tolerance", oracle_frac_min - or_frac, 0.0,
                        n_paths)));

  out.summary["median_hausdorff_norm"] = med_h;
  out.summary["endpoint_fraction"] = ep_frac;
  out.summary["oracle_fraction"] = or_frac;
  out.summary["median_endpoint_norm"] = median_of(ep_norm);
  out.summary["median_oracle_norm"] = median_of(or_norm);

  CsvTable t;
  t.header = {"path", "truth_diameter", "psi_points", "n_candidates", "hausdorff_norm",
              "endpoint_error_norm", "oracle_error_norm", "psi_inconclusive",
              "oracle_inconclusive"};
  for (std::size_t i = 0; i < n; ++i) {
    t.push_row({std::to_string(i), fmt_double(diam[i]), std::to_string(psi_points[i]),
                std::to_string(cand_count[i]), fmt_double(h_norm[i]), fmt_double(ep_norm[i]),
                fmt_double(or_norm[i]), psi_flag[i] ? "1" : "0", or_flag[i] ? "1" : "0"});
  }
  out.tables.emplace_back("paths", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// thick-points

ExperimentOutcome run_thick_points(const Config& cfg, std::uint64_t seed,
                                   const ExecPolicy& policy) {
  (void)policy;
  const std::uint32_t n_steps = config_steps(cfg, "n_steps");
  const std::vector<double> radii =
      config_double_list(cfg, "radii", {0.03125, 0.015625, 0.0078125});
  const double stat_lo = config_double(cfg, "stat_lo", 0.5);
  const double stat_hi = config_double(cfg, "stat_hi", 8.0);
  const std::uint64_t control_points = config_u64(cfg, "control_points", 65536);
  const double control_radius = config_double(cfg, "control_radius", 0.00390625);
  const double control_max = config_double(cfg, "control_max", 0.5);

  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  Rng rng(RngStreamSpec{derive_seed(seed, 0xB1), 0});
  const SamplePath path = simulate_bm(2, grid, rng);
  const ThickPointsResult bm = thick_points_statistic(cloud_from_path(path), radii);

  Rng rng2(RngStreamSpec{derive_seed(seed, 0xB2), 0});
  PointCloud disk;
  disk.dim = 2;
  for (std::uint64_t i = 0; i < control_points; ++i) {
    const double rad = std::sqrt(rng2.uniform());
    const double ang = 2.0 * std::numbers::pi * rng2.uniform();
    const double p[2] = {rad * std::cos(ang), rad * std::sin(ang)};
    disk.push(p);
  }
  const ThickPointsResult control = thick_points_statistic(disk, {control_radius});

  ExperimentOutcome out;
  out.verdicts.push_back(lift(make_verdict(
      "thick-statistic-bracket", std::max(stat_lo - bm.statistic, bm.statistic - stat_hi), 0.0,
      n_steps)));
  out.verdicts.push_back(lift(
      make_verdict("uniform-disk-control", control.statistic, control_max, control_points)));
  out.summary["bm_statistic"] = bm.statistic;
  out.summary["control_statistic"] = control.statistic;

  CsvTable t;
  t.header = {"source", "radius", "sup_ratio"};
  for (const auto& [r, ratio] : bm.profile) {
    t.push_row({"planar_bm", fmt_double(r), fmt_double(ratio)});
  }
  for (const auto& [r, ratio] : control.profile) {
    t.push_row({"uniform_disk", fmt_double(r), fmt_double(ratio)});
  }
  out.tables.emplace_back("profile", std::move(t));
  return out;
}

// ---------------------------------------------------------------------------
// topology-oracles

std::array<double, 3> random_unit3(Rng& rng) {
  while (true) {
    std::array<double, 3> v = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (n2 > 1e-12) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& x : v) x *= inv;
      return v;
    }
  }
}

std::array<double, 3> orthonormal_to(const std::array<double, 3>& u, Rng& rng) {
  while (true) {
    std::array<double, 3> v = random_unit3(rng);
    double d = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
    for (int i = 0; i < 3; ++i) v[i] -= d * u[i];
    const double n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (n2 > 1e-6) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& x : v) x *= inv;
      return v;
    }
  }
}

// Three widely separated slots on a random circle, each holding either a long
// spine (diameter comfortably above the count threshold under both the exact
// and the ball-union reading) or a compact blob (comfortably below under
// both), so the lattice count and the brute-force count must agree.
PointCloud cluster_cloud(Rng& rng) {
  constexpr double kSlotRadius = 0.65;
  constexpr double kSpineLen = 0.625;
  constexpr double kSpineStep = 0.0125;
  constexpr double kJitter = 0.003;
  constexpr double kBlobRadius = 0.04;
  constexpr int kBlobPoints = 25;

  PointCloud cloud;
  cloud.dim = 3;
  const std::array<double, 3> u = random_unit3(rng);
  const std::array<double, 3> v = orthonormal_to(u, rng);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  for (int s = 0; s < 3; ++s) {
    const double ang = phase + 2.0 * std::numbers::pi * s / 3.0;
    std::array<double, 3> c;
    for (int i = 0; i < 3; ++i) {
      c[i] = kSlotRadius * (std::cos(ang) * u[i] + std::sin(ang) * v[i]);
    }
    if (rng.uniform() < 0.5) {
      const std::array<double, 3> w = random_unit3(rng);
      const int n_pts = static_cast<int>(std::lround(kSpineLen / kSpineStep)) + 1;
      for (int i = 0; i < n_pts; ++i) {
        const double off = i * kSpineStep - kSpineLen / 2.0;
        double p[3];
        for (int d = 0; d < 3; ++d) {
          p[d] = c[d] + off * w[d] + kJitter * (2.0 * rng.uniform() - 1.0);
        }
        cloud.push(p);
      }
    } else {
      for (int i = 0; i < kBlobPoints; ++i) {
        const std::array<double, 3> dir = random_unit3(rng);
        const double rad = kBlobRadius * std::cbrt(rng.uniform());
        double p[3];
        for (int d = 0; d < 3; ++d) p[d] = c[d] + rad * dir[d];
        cloud.push(p);
      }
    }
  }
  return cloud;
}

int oracle_component_count(const PointCloud& cloud, double link, double delta) {
  const BruteComponents bc = brute_components(cloud, link);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(bc.count));
  for (std::size_t i = 0; i < cloud.n(); ++i) members[bc.label[i]].push_back(i);
  int count = 0;
  for (const auto& m : members) {
    double best2 = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        best2 = std::max(best2, dist2(cloud.point(m[a]), cloud.point(m[b]), 3));
      }
    }
    if (std::sqrt(best2) >= delta) ++count;
  }
  return count;
}

// Persistent random walk of straight segments, rejected until it stays in
// the working ball, never returns near earlier parts of itself, and both time
// halves are wide. Simple tubes make the oracle's time cuts and the set
// machinery's bottlenecks the same structure, so the sandwich containment
// carries real margins rather than luck.
SamplePath simple_polyline(Rng& rng) {
  constexpr int kSegments = 5;
  constexpr int kPerSeg = 144;
  constexpr double kSegLen = 0.28;
  constexpr double kMaxTurn = 0.7;  // radians per joint
  constexpr double kBallRadius = 0.95;
  constexpr double kMinApproach = 0.16;
  constexpr double kArcExempt = 0.25;
  constexpr double kHalfExtent = 0.6;
  constexpr double kStep = kSegLen / kPerSeg;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::array<double, 3> pos = random_unit3(rng);
    const double r0 = 0.2 * std::cbrt(rng.uniform());
    for (double& x : pos) x *= r0;
    std::array<double, 3> dir = random_unit3(rng);

    std::vector<std::array<double, 3>> verts = {pos};
    bool ok = true;
    for (int s = 0; s < kSegments; ++s) {
      if (s > 0) {
        const double theta = kMaxTurn * rng.uniform();
        const std::array<double, 3> perp = orthonormal_to(dir, rng);
        for (int i = 0; i < 3; ++i) {
          dir[i] = std::cos(theta) * dir[i] + std::sin(theta) * perp[i];
        }
      }
      for (int i = 0; i < 3; ++i) pos[i] += kSegLen * dir[i];
      if (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2] > kBallRadius * kBallRadius) {
        ok = false;
        break;
      }
      verts.push_back(pos);
    }
    if (!ok) continue;

    SamplePath path;
    path.dim = 3;
    path.grid = TimeGrid{1.0, static_cast<std::uint32_t>(kSegments * kPerSeg)};
    path.points.reserve(3 * (static_cast<std::size_t>(kSegments) * kPerSeg + 1));
    for (int i = 0; i < 3; ++i) path.points.push_back(verts[0][i]);
    for (int s = 0; s < kSegments; ++s) {
      for (int k = 1; k <= kPerSeg; ++k) {
        const double f = static_cast<double>(k) / kPerSeg;
        for (int i = 0; i < 3; ++i) {
          path.points.push_back(verts[s][i] + f * (verts[s + 1][i] - verts[s][i]));
        }
      }
    }

    // Self-approach: points far apart along the walk must stay far in space.
    const std::uint32_t n_pts = path.grid.n_points();
    const auto exempt = static_cast<std::uint32_t>(std::ceil(kArcExempt / kStep));
    for (std::uint32_t i = 0; i < n_pts && ok; ++i) {
      for (std::uint32_t j = i + exempt; j < n_pts; ++j) {
        if (dist2(path.point(i), path.point(j), 3) < kMinApproach * kMinApproach) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;

    PointCloud head, tail;
    head.dim = tail.dim = 3;
    for (std::uint32_t i = 0; i < n_pts; ++i) {
      (2 * i < n_pts ? head : tail).push(path.point(i));
    }
    if (directional_diameter(head) < kHalfExtent || directional_diameter(tail) < kHalfExtent) {
      continue;
    }
    return path;
  }
  throw std::logic_error("simple_polyline: rejection sampling failed");
}

int count_uncovered(const PointCloud& xs, const PointCloud& cover, double tol) {
  int v = 0;
  for (std::size_t i = 0; i < xs.n(); ++i) {
    double best = kInf;
    for (std::size_t j = 0; j < cover.n(); ++j) {
      best = std::min(best, dist2(xs.point(i), cover.point(j), xs.dim));
    }
    if (!(best <= tol * tol)) ++v;
  }
  return v;
}

SamplePath axis_segment_path() {
  SamplePath path;
  path.dim = 3;
  path.grid = TimeGrid{1.0, 1800};
  for (int k = 0; k <= 1800; ++k) {
    path.points.push_back(-0.9 + 1.8 * k / 1800.0);
    path.points.push_back(0.0);
    path.points.push_back(0.0);
  }
  return path;
}

SamplePath circle_path() {
  SamplePath path;
  path.dim = 3;
  path.grid = TimeGrid{1.0, 1200};
  for (int k = 0; k <= 1200; ++k) {
    const double ang = 2.0 * std::numbers::pi * (k % 1200) / 1200.0;
    path.points.push_back(0.6 * std::cos(ang));
    path.points.push_back(0.6 * std::sin(ang));
    path.points.push_back(0.0);
  }
  return path;
}

ExperimentOutcome run_topology_oracles(const Config& cfg, std::uint64_t seed,
                                       const ExecPolicy& policy) {
  const std::uint64_t n_clouds = config_u64(cfg, "n_clouds", 30);
  const std::uint64_t n_polylines = config_u64(cfg, "n_polylines", 10);
  const std::uint64_t n_paths_cut = config_u64(cfg, "n_paths_cut", 30);
  const std::uint32_t cut_n_steps = config_steps(cfg, "cut_n_steps");
  const double tail_lo = config_double(cfg, "tail_lo", 0.9);
  const double tail_frac_min = config_double(cfg, "tail_frac_min", 0.9);

  ExperimentOutcome out;

  // Component counts against the brute-force oracle.
  constexpr double kCountDelta = 0.45;
  constexpr double kLink = 0.06;
  CsvTable comp;
  comp.header = {"cloud", "n_points", "lattice_count", "oracle_count"};
  std::uint64_t mismatches = 0;
  for (std::uint64_t c = 0; c < n_clouds; ++c) {
    Rng rng(RngStreamSpec{derive_seed(seed, 0xC1), c});
    const PointCloud cloud = cluster_cloud(rng);
    const int got = component_count_N_delta(cloud, kCountDelta, 5);
    const int want = oracle_component_count(cloud, kLink, kCountDelta);
    mismatches += got != want ? 1 : 0;
    comp.push_row({std::to_string(c), std::to_string(cloud.n()), std::to_string(got),
                   std::to_string(want)});
  }
  out.verdicts.push_back(lift(make_verdict("component-count-matches-oracle",
                                           static_cast<double>(mismatches), 0.0, n_clouds)));
  out.tables.emplace_back("components", std::move(comp));

  // Sandwich containment on simple polylines: every strongly cutting position
  // (wide pieces even under a generous linking tolerance) must appear among
  // the lattice cut centers, and every lattice cut center must sit near some
  // weakly cutting position (narrow pieces under a tight tolerance).
  constexpr double kDeltaHi = 0.55, kDelta = 0.16, kDeltaLo = 0.11;
  constexpr int kJ = 5;
  constexpr double kTol = 2.0 / 32.0;  // 2 * 2^-j
  constexpr double kGapTolWide = 0.14;
  constexpr double kGapTolNarrow = 0.02;
  CsvTable sand;
  sand.header = {"polyline", "n_points", "cut_centers", "oracle_wide", "oracle_narrow",
                 "uncovered_wide_in_cuts", "uncovered_cuts_in_narrow"};
  std::uint64_t sandwich_violations = 0;
  std::uint64_t empty_oracles = 0;
  std::vector<std::array<std::uint64_t, 7>> sand_rows(n_polylines);
  replica_for(n_polylines, policy, [&](std::uint64_t p, int) {
    Rng rng(RngStreamSpec{derive_seed(seed, 0xC2), p});
    const SamplePath poly = simple_polyline(rng);
    const PointCloud cloud = cloud_from_path(poly);
    const PointCloud cuts = delta_cutpoints(cloud, kDelta, kJ);
    const PointCloud wide = oracle_cut_positions_by_delta(poly, kGapTolWide, {kDeltaHi})[0];
    const PointCloud narrow = oracle_cut_positions_by_delta(poly, kGapTolNarrow, {kDeltaLo})[0];
    const auto v1 = static_cast<std::uint64_t>(count_uncovered(wide, cuts, kTol));
    const auto v2 = static_cast<std::uint64_t>(count_uncovered(cuts, narrow, kTol));
    sand_rows[p] = {p, cloud.n(), cuts.n(), wide.n(), narrow.n(), v1, v2};
  });
  for (const auto& row : sand_rows) {
    sandwich_violations += row[5] + row[6];
    empty_oracles += row[3] == 0 ? 1 : 0;
    std::vector<std::string> cells;
    for (std::uint64_t x : row) cells.push_back(std::to_string(x));
    sand.push_row(std::move(cells));
  }
  out.verdicts.push_back(lift(make_verdict(
      "cutpoint-sandwich", static_cast<double>(sandwich_violations), 0.0, n_polylines)));
  out.verdicts.push_back(lift(make_verdict(
      "sandwich-oracle-nonempty", static_cast<double>(empty_oracles), 0.0, n_polylines)));
  out.tables.emplace_back("sandwich", std::move(sand));

  // Exact segment and loop behavior.
  CsvTable ex;
  ex.header = {"case", "quantity", "value"};
  {
    const SamplePath seg = axis_segment_path();
    const PointCloud cloud = cloud_from_path(seg);
    const PointCloud cuts = delta_cutpoints(cloud, 0.5, 4);
    std::uint64_t viol = cuts.n() == 0 ? 1 : 0;
    for (std::size_t i = 0; i < cuts.n(); ++i) {
      const double* c = cuts.point(i);
      if (std::abs(c[0]) > 0.47) ++viol;
      if (std::sqrt(c[1] * c[1] + c[2] * c[2]) > 0.07) ++viol;
    }
    for (double x = -0.3; x <= 0.3 + 1e-9; x += 0.05) {
      const double probe[3] = {x, 0.0, 0.0};
      PointCloud one;
      one.dim = 3;
      one.push(probe);
      viol += static_cast<std::uint64_t>(count_uncovered(one, cuts, 2.0 / 16.0));
    }
    out.verdicts.push_back(lift(
        make_verdict("segment-cutpoints-interior", static_cast<double>(viol), 0.0, cuts.n())));
    ex.push_row({"segment", "cut_centers", std::to_string(cuts.n())});

    const std::vector<double> times = cut_times_oracle(seg, 2.0 * cloud.resolution);
    std::uint64_t tviol = times.empty() ? 1 : 0;
    if (!times.empty()) {
      const auto k_lo = static_cast<int>(std::lround(times.front() * 1800.0));
      const auto k_hi = static_cast<int>(std::lround(times.back() * 1800.0));
      if (k_lo > 4 || k_hi < 1796) ++tviol;
      if (times.size() != static_cast<std::size_t>(k_hi - k_lo + 1)) ++tviol;
    }
    out.verdicts.push_back(lift(make_verdict("segment-cut-times-contiguous",
                                             static_cast<double>(tviol), 0.0, times.size())));
    ex.push_row({"segment", "cut_times", std::to_string(times.size())});
  }
  {
    const SamplePath loop = circle_path();
    const PointCloud cloud = cloud_from_path(loop);
    const PointCloud cuts = delta_cutpoints(cloud, 0.5, 4);
    out.verdicts.push_back(lift(
        make_verdict("loop-cutpoints-empty", static_cast<double>(cuts.n()), 0.0, cloud.n())));
    const std::vector<double> times = cut_times_oracle(loop, 2.0 * cloud.resolution);
    out.verdicts.push_back(lift(
        make_verdict("loop-cut-times-empty", static_cast<double>(times.size()), 0.0, cloud.n())));
    ex.push_row({"loop", "cut_centers", std::to_string(cuts.n())});
    ex.push_row({"loop", "cut_times", std::to_string(times.size())});
  }
  out.tables.emplace_back("examples", std::move(ex));

  // Late cut times on simulated 3-d paths.
  const TimeGrid grid{1.0, cut_n_steps};
  grid.validate();
  std::vector<std::uint8_t> has_tail(n_paths_cut, 0);
  std::vector<std::uint64_t> n_cuts(n_paths_cut, 0);
  replica_for(n_paths_cut, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{derive_seed(seed, 0xC4), r});
    const SamplePath path = simulate_bm(3, grid, rng);
    const double gap_tol = 2.0 * cloud_from_path(path).resolution;
    const std::vector<double> times = cut_times_oracle(path, gap_tol);
    n_cuts[r] = times.size();
    for (double t : times) {
      if (t > tail_lo && t < 1.0) {
        has_tail[r] = 1;
        break;
      }
    }
  });
  std::uint64_t tail_count = 0;
  CsvTable tails;
  tails.header = {"path", "n_cut_times", "has_late_cut"};
  for (std::uint64_t r = 0; r < n_paths_cut; ++r) {
    tail_count += has_tail[r];
    tails.push_row({std::to_string(r), std::to_string(n_cuts[r]), has_tail[r] ? "1" : "0"});
  }
  const double tail_frac = static_cast<double>(tail_count) / static_cast<double>(n_paths_cut);
  out.verdicts.push_back(lift(
      make_verdict("late-cut-times-fraction", tail_frac_min - tail_frac, 0.0, n_paths_cut)));
  out.summary["late_cut_fraction"] = tail_frac;
  out.tables.emplace_back("cut_tails", std::move(tails));
  return out;
}

// ---------------------------------------------------------------------------
// registry

using RunnerFn = ExperimentOutcome (*)(const Config&, std::uint64_t, const ExecPolicy&);

struct Entry {
  ExperimentInfo info;
  RunnerFn fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"sampling-identity",
        "Binned regression of the endpoint sign indicator on the positive-side occupation of "
        "1-d Brownian motion, against the diagonal.",
        {{"n_paths", "100000"},
         {"n_steps", "16384"},
         {"n_bins", "20"},
         {"allowance", "0.02"},
         {"min_bin_count", "100"}}},
       &run_sampling_identity},
      {{"beta-laws",
        "KS tests of the positive occupation time against its beta laws, unconditionally and "
        "given the endpoint sign.",
        {{"n_paths", "100000"},
         {"n_steps", "16384"},
         {"alpha", "2"},
         {"beta_skew", "0"},
         {"ks_unconditional", "0.02"},
         {"ks_conditional", "0.03"}}},
       &run_beta_laws},
      {{"perturbed",
        "Occupation-time beta laws for the maximum-perturbed one-dimensional process across "
        "perturbation strengths.",
        {{"mu_list", "0.5,1"},
         {"n_paths", "100000"},
         {"n_steps", "16384"},
         {"ks_unconditional", "0.02"},
         {"ks_conditional", "0.03"}}},
       &run_perturbed},
      {{"exchangeability",
        "Chi-square homogeneity of angle tuples sampled at the endpoint versus at uniform "
        "times, plus a two-point control that must reject.",
        {{"n_samples", "10000"},
         {"n_steps", "4096"},
         {"angle_atoms", "0.5,2.0,4.0"},
         {"angle_probs", "0.5,0.3,0.2"},
         {"tuple_sizes", "2,3"},
         {"level", "0.01"},
         {"converse_a", "0.3333333333333333"},
         {"cell_budget", "4096"}}},
       &run_exchangeability},
      {{"converse-example",
        "Two-point switch process: exact symmetric-pair probabilities against Monte Carlo.",
        {{"a", "0.3333333333333333"}, {"n_samples", "100000"}}},
       &run_converse_example},
      {{"weight-characterization",
        "Stationary-weight discrepancies (degenerate and exponential vanish, uniform does not) "
        "and the power-weight endpoint regression with a non-power control.",
        {{"alpha_list", "0.5,1,2"},
         {"lambda", "1"},
         {"mc_samples", "200000"},
         {"power_lambdas", "1,2"},
         {"n_paths", "100000"},
         {"n_steps", "2048"},
         {"n_bins", "20"},
         {"allowance", "0.02"}}},
       &run_weight_characterization},
      {{"levmore-surface",
        "Endpoint-probability surface f(t, a) over occupation bins: integral, endpoint, "
        "small-t, and interior-bump checks.",
        {{"n_paths", "200000"},
         {"n_steps", "4096"},
         {"a_bins", "20"},
         {"t_grid",
          "0.01,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,"
          "0.9,0.95,1"}}},
       &run_levmore_surface},
      {{"quadrant",
        "Planar rare-event trial at one epsilon window, plus exact minimum-law cross-checks "
        "and their small-delta limits.",
        {{"epsilon", "0.05"},
         {"n_paths", "100000"},
         {"n_steps", "16384"},
         {"min_hits", "100"},
         {"min_deltas", "0.05,0.1,0.2"},
         {"min_n_paths", "200000"},
         {"min_n_steps", "4096"}}},
       &run_quadrant},
      {{"quadrant-scan",
        "Rare-event scaling scan across epsilon windows: hit rates, conditional endpoint "
        "probabilities, and log-log slopes.",
        {{"epsilons", "0.04,0.05,0.06,0.07,0.08,0.09,0.1"},
         {"epsilon_star", "0.05"},
         {"n_paths", "300000"},
         {"n_steps", "2048"},
         {"min_hits", "50"}}},
       &run_quadrant_scan},
      {{"recovery-d3",
        "Range and endpoint recovery from the projected occupation measure of 3-d Brownian "
        "paths, with an oracle ablation using the true cut structure.",
        {{"n_paths", "6"},
         {"n_steps", "65536"},
         {"j_max", "5"},
         {"j_range", "2,3,4"},
         {"limsup_tol", "0.15"},
         {"delta_schedule", "0.5,0.25,0.125"},
         {"phi_level", "3"},
         {"gap_tol_mult", "2"},
         {"kappa", "1"},
         {"hausdorff_median_max", "0.25"},
         {"endpoint_tol", "0.15"},
         {"endpoint_frac_min", "0.6"},
         {"oracle_tol", "0.05"},
         {"oracle_frac_min", "0.9"}}},
       &run_recovery_d3},
      {{"thick-points",
        "Thick-point statistic of planar Brownian occupation against a uniform-disk control.",
        {{"n_steps", "262144"},
         {"radii", "0.03125,0.015625,0.0078125"},
         {"stat_lo", "0.5"},
         {"stat_hi", "8"},
         {"control_points", "65536"},
         {"control_radius", "0.00390625"},
         {"control_max", "0.5"}}},
       &run_thick_points},
      {{"topology-oracles",
        "Component counts, cutpoint sandwich containments, exact segment and loop cases, and "
        "late cut times, each against brute-force oracles.",
        {{"n_clouds", "30"},
         {"n_polylines", "10"},
         {"n_paths_cut", "30"},
         {"cut_n_steps", "16384"},
         {"tail_lo", "0.9"},
         {"tail_frac_min", "0.9"}}},
       &run_topology_oracles},
  };
  return table;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const ExperimentInfo& info : experiment_registry()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

std::string list_experiments_text() {
  std::string out = std::to_string(experiment_registry().size()) + " experiments\n";
  for (const ExperimentInfo& info : experiment_registry()) {
    out += "\n" + info.name + "\n  " + info.summary + "\n  defaults:";
    for (const auto& [k, v] : info.defaults) out += " " + k + "=" + v;
    out += "\n";
  }
  return out;
}

RunStatus ExperimentOutcome::status() const {
  if (verdicts.empty()) return RunStatus::kInconclusive;
  bool all_passed = true;
  for (const CheckVerdict& v : verdicts) {
    if (v.inconclusive) return RunStatus::kInconclusive;
    all_passed = all_passed && v.passed;
  }
  return all_passed ? RunStatus::kPass : RunStatus::kFail;
}

ExperimentOutcome run_experiment_core(const std::string& name, const Config& overrides,
                                      std::uint64_t seed, int threads) {
  const Entry* entry = nullptr;
  for (const Entry& e : entries()) {
    if (e.info.name == name) {
      entry = &e;
      break;
    }
  }
  if (entry == nullptr) throw ConfigError("unknown experiment: " + name);

  Config effective = entry->info.defaults;
  for (const auto& [k, v] : overrides) effective[k] = v;
  std::vector<std::string> known;
  for (const auto& [k, v] : entry->info.defaults) known.push_back(k);
  require_known_keys(effective, known);

  ExecPolicy policy;
  policy.threads = threads;
  ExperimentOutcome out = entry->fn(effective, seed, policy);
  out.effective = std::move(effective);
  out.tables.insert(out.tables.begin(), {"verdicts", verdict_table(out.verdicts)});
  return out;
}

RunStatus run_experiment(const RunContext& ctx) {
  ExperimentOutcome out = run_experiment_core(ctx.experiment, ctx.config, ctx.seed, ctx.threads);
  const RunStatus status = out.status();

  nlohmann::json report;
  report["experiment"] = ctx.experiment;
  report["seed"] = ctx.seed;
  report["threads"] = ctx.threads;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : out.effective) cfg[k] = v;
  report["config"] = cfg;
  report["config_hash"] = config_hash(out.effective);
  report["summary"] = out.summary;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const CheckVerdict& v : out.verdicts) {
    nlohmann::json j = verdict_json(v);
    j["inconclusive"] = v.inconclusive;
    verdicts.push_back(j);
  }
  report["verdicts"] = verdicts;
  report["status"] = status == RunStatus::kPass     ? "pass"
                     : status == RunStatus::kFail   ? "fail"
                                                    : "inconclusive";
  nlohmann::json names = nlohmann::json::array();
  for (const auto& [name, table] : out.tables) names.push_back(name);
  report["tables"] = names;

  RunContext eff = ctx;
  eff.config = out.effective;
  write_run_outputs(eff, report, out.tables);
  return status;
}

}  // namespace occlab
