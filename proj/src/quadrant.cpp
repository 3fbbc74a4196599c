#include "occlab/quadrant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "occlab/errors.hpp"
#include "occlab/occupation.hpp"
#include "occlab/path_engine.hpp"

namespace occlab {

std::pair<double, double> min_law_exact(double delta) {
  if (!(delta > 0.0)) throw std::domain_error("min_law_exact: delta must be positive");
  const double first = 2.0 * normal_cdf(delta) - 1.0;
  const double second = 0.5 - 2.0 * normal_cdf(-delta) + normal_cdf(-2.0 * delta);
  return {first, second};
}

double QuadrantTrialResult::p_hit() const {
  return n_paths == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n_paths);
}

double QuadrantTrialResult::conditional_q3() const {
  return hits == 0 ? 0.0 : static_cast<double>(joint_q3) / static_cast<double>(hits);
}

Interval QuadrantTrialResult::conditional_q3_wilson(double z) const {
  return wilson_interval(joint_q3, hits, z);
}

double QuadrantTrialResult::mean_mass_q3_given_hit() const {
  if (hits == 0) return 0.0;
  return static_cast<double>(occupancy_q3_steps) /
         (static_cast<double>(hits) * static_cast<double>(n_steps));
}

namespace {

struct QuadrantCounts {
  std::uint64_t hits = 0;
  std::uint64_t joint_q3 = 0;
  std::uint64_t endpoint_q2 = 0;
  std::uint64_t endpoint_q4 = 0;
  std::uint64_t hits_first_half = 0;
  std::uint64_t occ_q3 = 0;
};

// One pass over a shared set of paths, classifying every path against every
// epsilon window. The hit events are rare, so sharing paths across epsilons
// costs nothing statistically and saves a full re-simulation per window.
std::vector<QuadrantCounts> quadrant_counts_multi(const std::vector<double>& epsilons,
                                                  std::uint64_t n_paths, std::uint32_t n_steps,
                                                  std::uint64_t seed, const ExecPolicy& policy) {
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0 / 6.0)) {
      throw ConfigError("quadrant trial: epsilon must lie in (0, 1/6]");
    }
    if (static_cast<double>(n_steps) * eps < 64.0) {
      throw ConfigError("quadrant trial: need n_steps * epsilon >= 64");
    }
  }
  if (n_paths == 0) throw ConfigError("quadrant trial: n_paths must be positive");
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const double n = static_cast<double>(n_steps);
  const std::size_t ne = epsilons.size();
  std::vector<double> lo(ne), hi(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    lo[i] = epsilons[i] * n - 1e-9;
    hi[i] = 2.0 * epsilons[i] * n + 1e-9;
  }

  auto acc = make_thread_accumulators(policy, std::vector<QuadrantCounts>(ne));
  replica_for(n_paths, policy, [&](std::uint64_t r, int t) {
    Rng rng(RngStreamSpec{seed, r});
    BrownianWalker walker(2, grid, rng);
    double pos[2] = {0.0, 0.0};
    std::uint64_t c[4] = {0, 0, 0, 0};
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      ++c[quadrant_of(pos[0], pos[1])];
      walker.step(pos);
    }
    const int end_quad = quadrant_of(pos[0], pos[1]);
    auto& counts = acc[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < ne; ++i) {
      bool hit = true;
      for (int q = 1; q < 4; ++q) {
        const double cq = static_cast<double>(c[q]);
        if (cq < lo[i] || cq > hi[i]) {
          hit = false;
          break;
        }
      }
      if (!hit) continue;
      ++counts[i].hits;
      if (r < n_paths / 2) ++counts[i].hits_first_half;
      counts[i].occ_q3 += c[2];
      switch (end_quad) {
        case 1:
          ++counts[i].endpoint_q2;
          break;
        case 2:
          ++counts[i].joint_q3;
          break;
        case 3:
          ++counts[i].endpoint_q4;
          break;
        default:
          break;
      }
    }
  });

  std::vector<QuadrantCounts> total(ne);
  for (const auto& per_thread : acc) {
    for (std::size_t i = 0; i < ne; ++i) {
      total[i].hits += per_thread[i].hits;
      total[i].joint_q3 += per_thread[i].joint_q3;
      total[i].endpoint_q2 += per_thread[i].endpoint_q2;
      total[i].endpoint_q4 += per_thread[i].endpoint_q4;
      total[i].hits_first_half += per_thread[i].hits_first_half;
      total[i].occ_q3 += per_thread[i].occ_q3;
    }
  }
  return total;
}

QuadrantTrialResult pack_trial(double epsilon, std::uint64_t n_paths, std::uint32_t n_steps,
                               const QuadrantCounts& c) {
  QuadrantTrialResult out;
  out.epsilon = epsilon;
  out.n_paths = n_paths;
  out.n_steps = n_steps;
  out.hits = c.hits;
  out.joint_q3 = c.joint_q3;
  out.endpoint_q2 = c.endpoint_q2;
  out.endpoint_q4 = c.endpoint_q4;
  out.hits_first_half = c.hits_first_half;
  out.occupancy_q3_steps = c.occ_q3;
  return out;
}

}  // namespace

QuadrantTrialResult run_quadrant_trial(double epsilon, std::uint64_t n_paths,
                                       std::uint32_t n_steps, std::uint64_t seed,
                                       const ExecPolicy& policy) {
  const auto counts = quadrant_counts_multi({epsilon}, n_paths, n_steps, seed, policy);
  return pack_trial(epsilon, n_paths, n_steps, counts[0]);
}

ScalingScan scaling_scan(const std::vector<double>& epsilons, std::uint64_t n_paths,
                         std::uint32_t n_steps, std::uint64_t seed, const ExecPolicy& policy) {
  if (epsilons.size() < 2) throw ConfigError("scaling_scan: need at least two epsilons");
  const auto counts = quadrant_counts_multi(epsilons, n_paths, n_steps, seed, policy);
  ScalingScan scan;
  scan.rows.reserve(epsilons.size());
  std::vector<double> log_eps, log_p_hit, log_p_joint, log_p_hit_c, log_p_joint_c;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    ScalingScanRow row;
    row.trial = pack_trial(eps, n_paths, n_steps, counts[i]);
    row.p_joint = static_cast<double>(row.trial.joint_q3) / static_cast<double>(n_paths);
    scan.rows.push_back(row);
    if (row.trial.hits == 0 || row.trial.joint_q3 == 0) continue;
    const double le = std::log(eps);
    const double corr = 3.0 * std::log(std::log(1.0 / eps));
    log_eps.push_back(le);
    log_p_hit.push_back(std::log(row.trial.p_hit()));
    log_p_joint.push_back(std::log(row.p_joint));
    log_p_hit_c.push_back(std::log(row.trial.p_hit()) - corr);
    log_p_joint_c.push_back(std::log(row.p_joint) - corr);
  }
  if (log_eps.size() >= 2) {
    scan.slope_hit = regression_slope(log_eps, log_p_hit);
    scan.slope_joint = regression_slope(log_eps, log_p_joint);
    scan.slope_hit_logcorr = regression_slope(log_eps, log_p_hit_c);
    scan.slope_joint_logcorr = regression_slope(log_eps, log_p_joint_c);
  }
  return scan;
}

MinLawCheck min_law_mc_check(const std::vector<double>& deltas, std::uint64_t n_paths,
                             std::uint32_t n_steps, std::uint64_t seed,
                             const ExecPolicy& policy) {
  if (deltas.empty()) throw ConfigError("min_law_mc_check: empty delta list");
  for (double d : deltas) {
    if (!(d > 0.0)) throw ConfigError("min_law_mc_check: deltas must be positive");
  }
  const TimeGrid grid{1.0, n_steps};
  grid.validate();
  const std::size_t nd = deltas.size();
  struct Counts {
    std::vector<std::uint64_t> first;
    std::vector<std::uint64_t> second;
  };
  auto acc = make_thread_accumulators(
      policy, Counts{std::vector<std::uint64_t>(nd, 0), std::vector<std::uint64_t>(nd, 0)});
  replica_for(n_paths, policy, [&](std::uint64_t r, int t) {
    Rng rng(RngStreamSpec{seed, r});
    BrownianWalker walker(1, grid, rng);
    double pos = 0.0;
    double min_val = 0.0;
    for (std::uint32_t k = 0; k < n_steps; ++k) {
      walker.step(&pos);
      min_val = std::min(min_val, pos);
    }
    Counts& counts = acc[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < nd; ++i) {
      if (min_val >= -deltas[i]) {
        ++counts.first[i];
        if (pos < 0.0) ++counts.second[i];
      }
    }
  });
  MinLawCheck out;
  const double n = static_cast<double>(n_paths);
  const double grid_slack = 1.0 / std::sqrt(static_cast<double>(n_steps));
  double worst = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    std::uint64_t c1 = 0, c2 = 0;
    for (const Counts& c : acc) {
      c1 += c.first[i];
      c2 += c.second[i];
    }
    MinLawCheckRow row;
    row.delta = deltas[i];
    const auto [e1, e2] = min_law_exact(deltas[i]);
    row.exact_first = e1;
    row.exact_second = e2;
    row.empirical_first = static_cast<double>(c1) / n;
    row.empirical_second = static_cast<double>(c2) / n;
    row.se_first = std::sqrt(e1 * (1.0 - e1) / n);
    row.se_second = std::sqrt(e2 * (1.0 - e2) / n);
    out.rows.push_back(row);
    const double slack1 = 3.0 * row.se_first + grid_slack;
    const double slack2 = 3.0 * row.se_second + grid_slack;
    worst = std::max(worst, std::abs(row.empirical_first - e1) - slack1);
    worst = std::max(worst, std::abs(row.empirical_second - e2) - slack2);
  }
  out.verdict = make_verdict("grid-minimum-laws", worst, 0.0, n_paths);
  return out;
}

}  // namespace occlab
