#pragma once

// Planar Brownian occupation of the four quadrants: the event that three of
// them carry small but comparable mass, the conditional law of the endpoint
// given that event, and exact small-minimum laws for the one-dimensional
// marginals used as oracles.

#include <cstdint>
#include <utility>
#include <vector>

#include "occlab/parallel.hpp"
#include "occlab/stats.hpp"

namespace occlab {

// Exact laws for the running minimum m = min_{t <= 1} B_t of standard BM:
//   first:  P(m >= -delta)              = 2 Phi(delta) - 1
//   second: P(m >= -delta, B_1 < 0)     = 1/2 - 2 Phi(-delta) + Phi(-2 delta)
// As delta -> 0 these behave like delta * sqrt(2/pi) and delta^3 / sqrt(2 pi).
std::pair<double, double> min_law_exact(double delta);

struct QuadrantTrialResult {
  double epsilon = 0.0;
  std::uint64_t n_paths = 0;
  std::uint32_t n_steps = 0;
  std::uint64_t hits = 0;          // occupation of quadrants 2,3,4 all in [eps, 2 eps]
  std::uint64_t joint_q3 = 0;      // hit and endpoint in quadrant 3
  std::uint64_t endpoint_q2 = 0;   // hit and endpoint in quadrant 2
  std::uint64_t endpoint_q4 = 0;
  std::uint64_t hits_first_half = 0;
  std::uint64_t occupancy_q3_steps = 0;  // summed quadrant-3 step counts over hit paths

  double p_hit() const;
  double conditional_q3() const;         // P(endpoint in Q3 | hit)
  Interval conditional_q3_wilson(double z = 1.96) const;
  double mean_mass_q3_given_hit() const;
};

// Streams planar Brownian paths, counting per-quadrant occupation with the
// convention: Q1 = {x >= 0, y > 0}, Q2 = {x > 0, y <= 0}, Q3 = {x <= 0, y < 0},
// Q4 = {x < 0, y >= 0}; the time-zero origin point counts toward Q1.
QuadrantTrialResult run_quadrant_trial(double epsilon, std::uint64_t n_paths,
                                       std::uint32_t n_steps, std::uint64_t seed,
                                       const ExecPolicy& policy);

struct ScalingScanRow {
  QuadrantTrialResult trial;
  double p_joint = 0.0;
};

struct ScalingScan {
  std::vector<ScalingScanRow> rows;
  double slope_hit = 0.0;         // d log p_hit / d log eps
  double slope_joint = 0.0;
  double slope_hit_logcorr = 0.0;   // same after dividing p by log^3(1/eps)
  double slope_joint_logcorr = 0.0;
};

// One shared set of paths classifies every epsilon, so the rows are
// correlated across windows; fine for slope estimates, much cheaper.
ScalingScan scaling_scan(const std::vector<double>& epsilons, std::uint64_t n_paths,
                         std::uint32_t n_steps, std::uint64_t seed, const ExecPolicy& policy);

struct MinLawCheckRow {
  double delta = 0.0;
  double exact_first = 0.0;
  double exact_second = 0.0;
  double empirical_first = 0.0;
  double empirical_second = 0.0;
  double se_first = 0.0;
  double se_second = 0.0;
};

struct MinLawCheck {
  std::vector<MinLawCheckRow> rows;
  TestVerdict verdict;  // max z-like deviation over rows, discretization slack included
};

// Monte Carlo check of the exact minimum laws on the simulation grid. The
// grid minimum overshoots the continuum minimum by O(sqrt(dt)), so the
// tolerance adds n_steps^{-1/2} beyond 3 SE.
MinLawCheck min_law_mc_check(const std::vector<double>& deltas, std::uint64_t n_paths,
                             std::uint32_t n_steps, std::uint64_t seed,
                             const ExecPolicy& policy);

}  // namespace occlab
