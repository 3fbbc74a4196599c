#include "occlab/sampling_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "occlab/errors.hpp"

namespace occlab {

namespace {

constexpr double kHugeStatistic = 1e30;

CheckVerdict check_from(TestVerdict base, bool inconclusive = false) {
  CheckVerdict v;
  static_cast<TestVerdict&>(v) = std::move(base);
  v.inconclusive = inconclusive;
  if (inconclusive) v.passed = false;
  return v;
}

SamplingIdentityResult identity_from_arrays(const std::vector<double>& mass,
                                            const std::vector<double>& hit, std::size_t n_bins,
                                            double allowance, std::uint64_t min_bin_count,
                                            const std::string& name) {
  SamplingIdentityResult out{CheckVerdict{}, BinnedCurve(n_bins), 0};
  for (std::size_t i = 0; i < mass.size(); ++i) out.curve.add(mass[i], hit[i]);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (out.curve.count(b) < min_bin_count) continue;
    ++out.qualifying_bins;
    const double dev = std::abs(out.curve.mean(b) - out.curve.bin_center(b));
    worst = std::max(worst, dev - 3.0 * out.curve.std_error(b));
  }
  if (out.qualifying_bins == 0) {
    out.verdict = check_from(make_verdict(name, kHugeStatistic, allowance, mass.size()), true);
  } else {
    out.verdict = check_from(make_verdict(name, worst, allowance, mass.size()));
  }
  return out;
}

CheckVerdict ks_verdict(const std::string& name, std::vector<double> samples, const BetaLaw& law,
                        double threshold) {
  if (samples.size() < 16) {
    return check_from(make_verdict(name, kHugeStatistic, threshold, samples.size()), true);
  }
  const std::size_t n = samples.size();
  const double d =
      ks_distance(std::move(samples), [&law](double x) { return beta_law_cdf(law, x); });
  return check_from(make_verdict(name, d, threshold, n));
}

}  // namespace

double beta_law_cdf(const BetaLaw& law, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("beta_law_cdf: x outside [0,1]");
  return beta_cdf(law.a, law.b, x);
}

SamplingIdentityResult sampling_identity_check(const MassEndpointSampler& sampler,
                                               std::uint64_t n_paths, std::size_t n_bins,
                                               std::uint64_t seed, const ExecPolicy& policy,
                                               double allowance, std::uint64_t min_bin_count) {
  if (n_paths == 0) throw ConfigError("sampling_identity_check: n_paths must be positive");
  if (n_bins < 2) throw ConfigError("sampling_identity_check: need at least two bins");
  std::vector<double> mass(n_paths), hit(n_paths);
  replica_for(n_paths, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{seed, r});
    const MassEndpoint s = sampler(rng);
    mass[r] = s.mass;
    hit[r] = s.hit;
  });
  return identity_from_arrays(mass, hit, n_bins, allowance, min_bin_count, "diagonal-regression");
}

LevyBetaResult levy_beta_conditionals(double alpha, double beta_skew, std::uint64_t n_paths,
                                      std::uint32_t n_steps, std::uint64_t seed,
                                      const ExecPolicy& policy, double ks_threshold_uncond,
                                      double ks_threshold_cond) {
  const double p = stable_positivity(alpha, beta_skew);
  if (p < 1e-9 || p > 1.0 - 1e-9) {
    throw ConfigError("levy_beta_conditionals: degenerate positivity, one-sided process");
  }
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  std::vector<double> v1(n_paths);
  std::vector<std::int8_t> up(n_paths);
  replica_for(n_paths, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{seed, r});
    const SamplePath path = simulate_stable_levy(alpha, beta_skew, grid, rng);
    std::uint64_t count = 0;
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      if (path.points[k] > 0.0) ++count;
    }
    v1[r] = static_cast<double>(count) / static_cast<double>(n_steps);
    up[r] = path.points[n_steps] > 0.0 ? 1 : 0;
  });
  std::vector<double> pos, neg;
  pos.reserve(n_paths);
  neg.reserve(n_paths);
  for (std::uint64_t r = 0; r < n_paths; ++r) (up[r] ? pos : neg).push_back(v1[r]);

  LevyBetaResult out;
  out.positivity = p;
  out.unconditional =
      ks_verdict("time-positive-ks", v1, BetaLaw{p, 1.0 - p}, ks_threshold_uncond);
  out.given_positive = ks_verdict("time-positive-given-up-ks", std::move(pos),
                                  BetaLaw{1.0 + p, 1.0 - p}, ks_threshold_cond);
  out.given_negative = ks_verdict("time-positive-given-down-ks", std::move(neg),
                                  BetaLaw{p, 2.0 - p}, ks_threshold_cond);
  return out;
}

PerturbedBetaResult perturbed_beta_check(double mu, std::uint64_t n_paths, std::uint32_t n_steps,
                                         std::uint64_t seed, const ExecPolicy& policy,
                                         double ks_threshold, double ks_threshold_cond) {
  if (!(mu > 0.0)) throw ConfigError("perturbed_beta_check: mu must be positive");
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  std::vector<double> v1m(n_paths);
  std::vector<std::int8_t> up(n_paths);
  replica_for(n_paths, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{seed, r});
    const SamplePath path = simulate_perturbed_bm(mu, grid, rng);
    std::uint64_t count = 0;
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      if (path.points[k] < 0.0) ++count;
    }
    v1m[r] = static_cast<double>(count) / static_cast<double>(n_steps);
    up[r] = path.points[n_steps] > 0.0 ? 1 : 0;
  });
  std::vector<double> pos, neg;
  pos.reserve(n_paths);
  neg.reserve(n_paths);
  for (std::uint64_t r = 0; r < n_paths; ++r) (up[r] ? pos : neg).push_back(v1m[r]);

  const double inv2mu = 1.0 / (2.0 * mu);
  PerturbedBetaResult out;
  out.time_below = ks_verdict("time-below-ks", v1m, BetaLaw{0.5, inv2mu}, ks_threshold);
  out.given_negative = ks_verdict("time-below-given-down-ks", std::move(neg),
                                  BetaLaw{1.5, inv2mu}, ks_threshold_cond);
  out.given_positive = ks_verdict("time-below-given-up-ks", std::move(pos),
                                  BetaLaw{0.5, 1.0 + inv2mu}, ks_threshold_cond);
  return out;
}

ConverseExampleResult converse_example_stats(double a, std::uint64_t n_samples,
                                             std::uint64_t seed, const ExecPolicy& policy) {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("converse_example_stats: a must lie in (0,1)");
  if (n_samples == 0) throw ConfigError("converse_example_stats: n_samples must be positive");
  struct Counts {
    std::uint64_t end_match = 0;
    std::uint64_t pair_match = 0;
  };
  auto acc = make_thread_accumulators(policy, Counts{});
  replica_for(n_samples, policy, [&](std::uint64_t r, int t) {
    Rng rng(RngStreamSpec{seed, r});
    const double x = rng.uniform() < 0.5 ? 1.0 : -1.0;
    const double y = -x;
    auto at = [&](double time) { return time < a ? x : y; };
    const double u2 = rng.uniform();
    if (at(1.0) == at(u2)) ++acc[t].end_match;
    const double w1 = rng.uniform();
    const double w2 = rng.uniform();
    if (at(w1) == at(w2)) ++acc[t].pair_match;
  });
  Counts total;
  for (const Counts& c : acc) {
    total.end_match += c.end_match;
    total.pair_match += c.pair_match;
  }
  ConverseExampleResult out;
  out.exact_end_vs_uniform = 1.0 - a;
  out.exact_uniform_pair = a * a + (1.0 - a) * (1.0 - a);
  const double n = static_cast<double>(n_samples);
  out.empirical_end_vs_uniform = static_cast<double>(total.end_match) / n;
  out.empirical_uniform_pair = static_cast<double>(total.pair_match) / n;
  out.se_end_vs_uniform =
      std::sqrt(out.exact_end_vs_uniform * (1.0 - out.exact_end_vs_uniform) / n);
  out.se_uniform_pair = std::sqrt(out.exact_uniform_pair * (1.0 - out.exact_uniform_pair) / n);
  const double z1 =
      std::abs(out.empirical_end_vs_uniform - out.exact_end_vs_uniform) / out.se_end_vs_uniform;
  const double z2 =
      std::abs(out.empirical_uniform_pair - out.exact_uniform_pair) / out.se_uniform_pair;
  out.verdict = check_from(make_verdict("two-point-exact-match", std::max(z1, z2), 3.0, n_samples));
  return out;
}

ExchangeabilityResult exchangeability_chi_square(const CategoricalProcessSampler& sampler,
                                                 int tuple_size, std::uint64_t n_samples,
                                                 std::uint64_t seed, const ExecPolicy& policy,
                                                 double level, std::uint64_t cell_budget) {
  if (sampler.n_categories < 2) throw ConfigError("exchangeability: need >= 2 categories");
  if (tuple_size < 2) throw ConfigError("exchangeability: tuple size must be >= 2");
  std::uint64_t cells = 1;
  for (int i = 0; i < tuple_size; ++i) {
    cells *= static_cast<std::uint64_t>(sampler.n_categories);
    if (cells > cell_budget) throw ConfigError("exchangeability: cell count exceeds budget");
  }
  struct Counts {
    std::vector<std::uint64_t> with_end;
    std::vector<std::uint64_t> uniform_only;
  };
  auto acc = make_thread_accumulators(
      policy, Counts{std::vector<std::uint64_t>(cells, 0), std::vector<std::uint64_t>(cells, 0)});
  const int k = sampler.n_categories;
  replica_for(n_samples, policy, [&](std::uint64_t r, int t) {
    Rng rng(RngStreamSpec{seed, r});
    std::vector<std::uint32_t> tup(static_cast<std::size_t>(tuple_size));
    auto cell_of = [&]() {
      std::uint64_t c = 0;
      for (int i = 0; i < tuple_size; ++i)
        c = c * static_cast<std::uint64_t>(k) + tup[static_cast<std::size_t>(i)];
      return c;
    };
    sampler.draw(rng, true, tuple_size, tup.data());
    ++acc[t].with_end[cell_of()];
    sampler.draw(rng, false, tuple_size, tup.data());
    ++acc[t].uniform_only[cell_of()];
  });
  std::vector<std::uint64_t> a(cells, 0), b(cells, 0);
  for (const Counts& c : acc) {
    for (std::uint64_t i = 0; i < cells; ++i) {
      a[i] += c.with_end[i];
      b[i] += c.uniform_only[i];
    }
  }
  ExchangeabilityResult out;
  out.chi = chi_square_two_sample(a, b);
  const double threshold =
      out.chi.df > 0.0 ? chi_square_quantile(1.0 - level, out.chi.df) : 0.0;
  out.non_rejection = check_from(
      make_verdict("tuple-homogeneity-chi2", out.chi.statistic, threshold, 2 * n_samples));
  return out;
}

Discrepancy stationary_weight_discrepancy(const WeightLaw& law, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("stationary_weight_discrepancy: alpha must be > 0");
  switch (law.kind) {
    case WeightLaw::Kind::kDelta0:
      return {0.0, 0.0};
    case WeightLaw::Kind::kExponential: {
      if (!(law.lambda > 0.0)) throw std::domain_error("exponential law needs lambda > 0");
      // |xi| ~ exp(lambda) and xi_1 - xi_2 ~ Laplace(lambda) share the
      // transform lambda / (lambda + alpha), so the discrepancy vanishes.
      return {0.0, 0.0};
    }
    case WeightLaw::Kind::kUniform01: {
      const double e = std::exp(-alpha);
      const double single = (1.0 - e) / alpha;
      const double pair = 2.0 * (single - (1.0 - (1.0 + alpha) * e) / (alpha * alpha));
      return {single - pair, 0.0};
    }
  }
  throw std::logic_error("stationary_weight_discrepancy: unknown law");
}

Discrepancy stationary_weight_discrepancy_mc(const std::function<double(Rng&)>& sample,
                                             double alpha, std::uint64_t n, std::uint64_t seed,
                                             const ExecPolicy& policy) {
  if (!(alpha > 0.0)) throw std::domain_error("stationary_weight_discrepancy_mc: alpha > 0");
  if (n == 0) throw ConfigError("stationary_weight_discrepancy_mc: n must be positive");
  std::vector<double> term(n);
  replica_for(n, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{seed, r});
    const double x1 = sample(rng);
    const double x2 = sample(rng);
    term[r] = std::exp(-alpha * std::abs(x1)) - std::exp(-alpha * std::abs(x1 - x2));
  });
  const SummaryStats s = summarize(term);
  return {s.mean, s.std_error};
}

double TimeWeight::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  switch (kind) {
    case Kind::kPower:
      return std::pow(t, lambda);
    case Kind::kUniformHalfOne:
      return t <= 0.5 ? 0.0 : 2.0 * t - 1.0;
  }
  return t;
}

SamplingIdentityResult power_weight_identity_check(const TimeWeight& weight,
                                                   std::uint64_t n_paths, std::uint32_t n_steps,
                                                   std::size_t n_bins, std::uint64_t seed,
                                                   const ExecPolicy& policy, double allowance) {
  if (weight.kind == TimeWeight::Kind::kPower && !(weight.lambda > 0.0)) {
    throw ConfigError("power_weight_identity_check: lambda must be positive");
  }
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  std::vector<double> increments(n_steps);
  for (std::uint32_t k = 0; k < n_steps; ++k) {
    increments[k] = weight.cdf(grid.time(k + 1)) - weight.cdf(grid.time(k));
  }
  std::vector<double> mass(n_paths), hit(n_paths);
  replica_for(n_paths, policy, [&](std::uint64_t r, int) {
    Rng rng(RngStreamSpec{seed, r});
    BrownianWalker walker(1, grid, rng);
    double pos = 0.0;
    KahanSum weighted;
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      if (pos > 0.0) weighted.add(increments[k]);
      walker.step(&pos);
    }
    mass[r] = weighted.value();
    hit[r] = pos > 0.0 ? 1.0 : 0.0;
  });
  return identity_from_arrays(mass, hit, n_bins, allowance, 100, "weighted-diagonal-regression");
}

EndpointSurface endpoint_surface_f(std::uint64_t n_paths, std::uint32_t n_steps,
                                   std::vector<double> t_grid, std::size_t a_bins,
                                   std::uint64_t seed, const ExecPolicy& policy) {
  if (t_grid.empty()) throw ConfigError("endpoint_surface_f: empty t grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw ConfigError("endpoint_surface_f: t grid must be sorted");
  }
  if (t_grid.front() <= 0.0 || t_grid.back() > 1.0) {
    throw ConfigError("endpoint_surface_f: t grid must lie in (0,1]");
  }
  if (a_bins < 4) throw ConfigError("endpoint_surface_f: need at least 4 a-bins");
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const std::size_t nt = t_grid.size();
  std::vector<std::uint32_t> t_index(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const auto idx = static_cast<std::uint32_t>(std::llround(t_grid[i] * n_steps));
    t_index[i] = std::min(std::max<std::uint32_t>(idx, 1), n_steps);
  }
  struct Tables {
    std::vector<std::uint64_t> bin_count;
    std::vector<std::uint64_t> pos_count;       // a_bins * nt
    std::vector<std::uint64_t> sum_occupancy;   // integer positive-step counts
  };
  auto acc = make_thread_accumulators(
      policy, Tables{std::vector<std::uint64_t>(a_bins, 0),
                     std::vector<std::uint64_t>(a_bins * nt, 0),
                     std::vector<std::uint64_t>(a_bins, 0)});
  replica_for(n_paths, policy, [&](std::uint64_t r, int t) {
    Rng rng(RngStreamSpec{seed, r});
    BrownianWalker walker(1, grid, rng);
    double pos = 0.0;
    std::uint64_t count = 0;
    std::size_t ti = 0;
    thread_local std::vector<std::uint8_t> positive_at;
    positive_at.assign(nt, 0);
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      if (pos > 0.0) ++count;
      walker.step(&pos);
      while (ti < nt && t_index[ti] == k + 1) {
        positive_at[ti] = pos > 0.0 ? 1 : 0;
        ++ti;
      }
    }
    const double v1 = static_cast<double>(count) / static_cast<double>(n_steps);
    const auto bin = std::min(static_cast<std::size_t>(v1 * static_cast<double>(a_bins)),
                              a_bins - 1);
    Tables& tab = acc[static_cast<std::size_t>(t)];
    ++tab.bin_count[bin];
    tab.sum_occupancy[bin] += count;
    for (std::size_t i = 0; i < nt; ++i) {
      if (positive_at[i]) ++tab.pos_count[bin * nt + i];
    }
  });
  EndpointSurface out;
  out.t_values = t_grid;
  out.n_a_bins = a_bins;
  out.bin_count.assign(a_bins, 0);
  out.f_hat.assign(a_bins * nt, 0.0);
  out.integral_check.assign(a_bins, 0.0);
  std::vector<std::uint64_t> pos_total(a_bins * nt, 0), occ_total(a_bins, 0);
  for (const Tables& tab : acc) {
    for (std::size_t b = 0; b < a_bins; ++b) {
      out.bin_count[b] += tab.bin_count[b];
      occ_total[b] += tab.sum_occupancy[b];
    }
    for (std::size_t i = 0; i < a_bins * nt; ++i) pos_total[i] += tab.pos_count[i];
  }
  for (std::size_t b = 0; b < a_bins; ++b) {
    if (out.bin_count[b] == 0) continue;
    const double nb = static_cast<double>(out.bin_count[b]);
    out.integral_check[b] =
        static_cast<double>(occ_total[b]) / (nb * static_cast<double>(n_steps));
    for (std::size_t i = 0; i < nt; ++i) {
      out.f_hat[b * nt + i] = static_cast<double>(pos_total[b * nt + i]) / nb;
    }
  }

  auto bin_center = [&](std::size_t b) {
    return (static_cast<double>(b) + 0.5) / static_cast<double>(a_bins);
  };
  auto f_se = [&](std::size_t b, std::size_t i) {
    const double nb = static_cast<double>(out.bin_count[b]);
    const double f = out.f_hat[b * nt + i];
    return std::sqrt(std::max(f * (1.0 - f), 1e-12) / nb);
  };

  double worst_integral = -kHugeStatistic;
  double worst_small_t = -kHugeStatistic;
  double worst_endpoint = -kHugeStatistic;
  bool any_central = false;
  const bool has_t1 = t_grid.back() >= 1.0;
  for (std::size_t b = 0; b < a_bins; ++b) {
    if (out.bin_count[b] < 1000) continue;
    const double c = bin_center(b);
    if (c >= 0.2 && c <= 0.8) {
      any_central = true;
      worst_integral = std::max(worst_integral, std::abs(out.integral_check[b] - c));
      if (has_t1) {
        const double dev = std::abs(out.f_hat[b * nt + (nt - 1)] - out.integral_check[b]);
        worst_endpoint = std::max(worst_endpoint, dev - 3.0 * f_se(b, nt - 1));
      }
    }
    if (c >= 0.3 && c <= 0.7) {
      worst_small_t = std::max(worst_small_t, std::abs(out.f_hat[b * nt + 0] - 0.5));
    }
  }
  out.integral_verdict = check_from(
      make_verdict("surface-integral-matches-occupancy", worst_integral, 0.02, n_paths),
      !any_central);
  out.endpoint_verdict = check_from(
      make_verdict("surface-endpoint-diagonal", worst_endpoint, 0.02, n_paths),
      !any_central || !has_t1);
  out.small_t_verdict = check_from(
      make_verdict("surface-small-t-near-half", worst_small_t, 0.05, n_paths),
      worst_small_t == -kHugeStatistic);

  const std::size_t bump_bin =
      std::min(static_cast<std::size_t>(0.75 * static_cast<double>(a_bins)), a_bins - 1);
  double best_margin = -kHugeStatistic;
  if (out.bin_count[bump_bin] >= 1000) {
    const double c = bin_center(bump_bin);
    for (std::size_t i = 0; i < nt; ++i) {
      if (t_grid[i] >= 1.0) continue;
      best_margin =
          std::max(best_margin, out.f_hat[bump_bin * nt + i] - c - 3.0 * f_se(bump_bin, i));
    }
  }
  out.bump_verdict = check_from(
      make_verdict("surface-interior-bump", -best_margin, 0.0, n_paths),
      best_margin == -kHugeStatistic);
  return out;
}

CategoricalProcessSampler walsh_categorical_sampler(const TimeGrid& grid,
                                                    std::vector<double> angle_atoms,
                                                    std::vector<double> angle_probs) {
  grid.validate();
  if (angle_atoms.size() < 2 || angle_atoms.size() != angle_probs.size()) {
    throw ConfigError("walsh_categorical_sampler: need matching atoms and probs, >= 2 atoms");
  }
  CategoricalProcessSampler sampler;
  sampler.n_categories = static_cast<int>(angle_atoms.size());
  const AngleLaw law = AngleLaw::discrete(angle_atoms, angle_probs);
  sampler.draw = [grid, law, atoms = std::move(angle_atoms)](Rng& rng, bool endpoint_first,
                                                             int n, std::uint32_t* out) {
    const AngleProcess proc = simulate_walsh_angles(grid, law, rng);
    auto category_at = [&](double t) {
      auto k = static_cast<std::uint32_t>(std::llround(t * grid.n_steps));
      k = std::min(k, grid.n_steps);
      const double angle = proc.angle_at(k);
      std::uint32_t best = 0;
      double best_gap = std::abs(atoms[0] - angle);
      for (std::uint32_t i = 1; i < atoms.size(); ++i) {
        const double gap = std::abs(atoms[i] - angle);
        if (gap < best_gap) {
          best_gap = gap;
          best = i;
        }
      }
      return best;
    };
    int i = 0;
    if (endpoint_first) out[i++] = category_at(1.0);
    for (; i < n; ++i) out[i] = category_at(rng.uniform());
  };
  return sampler;
}

CategoricalProcessSampler converse_categorical_sampler(double a) {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("converse_categorical_sampler: a in (0,1)");
  CategoricalProcessSampler sampler;
  sampler.n_categories = 2;
  sampler.draw = [a](Rng& rng, bool endpoint_first, int n, std::uint32_t* out) {
    const double x = rng.uniform() < 0.5 ? 1.0 : -1.0;
    auto category_at = [&](double t) {
      const double v = t < a ? x : -x;
      return v > 0.0 ? 1u : 0u;
    };
    int i = 0;
    if (endpoint_first) out[i++] = category_at(1.0);
    for (; i < n; ++i) out[i] = category_at(rng.uniform());
  };
  return sampler;
}

}  // namespace occlab
