#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "occlab/cover.hpp"
#include "occlab/errors.hpp"
#include "occlab/geom.hpp"
#include "occlab/recovery.hpp"
#include "occlab/rng.hpp"

using namespace occlab;

namespace {

const CoverHierarchy& cover3() {
  static const CoverHierarchy cover = build_cover(3, 5);
  return cover;
}

// Every atom at one direction: cap masses are exactly the total weight, so
// the thickness ratios reduce to closed forms.
OccupationMeasure point_measure(const std::vector<double>& u, std::size_t n_atoms) {
  OccupationMeasure mu;
  mu.dim = static_cast<int>(u.size());
  mu.weights.assign(n_atoms, 1.0 / static_cast<double>(n_atoms));
  for (std::size_t a = 0; a < n_atoms; ++a) {
    mu.directions.insert(mu.directions.end(), u.begin(), u.end());
  }
  return mu;
}

double point_rho(double r) { return 1.0 / (std::sqrt(2.0) * r * std::abs(std::log(r))); }

double cloud_max_norm(const PointCloud& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.n(); ++i) {
    best = std::max(best, norm(c.point(i), c.dim));
  }
  return best;
}

}  // namespace

TEST_CASE("rho_r_min scales as the atom noise radius") {
  CHECK(rho_r_min(point_measure({0.0, 0.0, 1.0}, 10000)) == doctest::Approx(0.04));
  CHECK(rho_r_min(point_measure({0.0, 0.0, 1.0}, 400)) == doctest::Approx(0.2));
  OccupationMeasure empty;
  empty.dim = 3;
  CHECK_THROWS_AS(rho_r_min(empty), ConfigError);
}

TEST_CASE("rho_estimate recovers the closed-form ratio of a point mass") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);
  const Cap cap{u, 0.5};
  RhoParams params;
  params.radii = {0.2, 0.1};

  const RhoEstimate est = rho_estimate(mu, cap, cover3(), params);
  REQUIRE(est.profile.size() == 2);
  CHECK(est.profile[0].first == 0.2);
  CHECK(est.profile[1].first == 0.1);
  CHECK(est.profile[0].second == doctest::Approx(point_rho(0.2) * point_rho(0.2)).epsilon(1e-9));
  CHECK(est.profile[1].second == doctest::Approx(point_rho(0.1) * point_rho(0.1)).epsilon(1e-9));
  // The smaller radius has the smaller denominator and wins.
  CHECK(est.value == doctest::Approx(point_rho(0.1)).epsilon(1e-9));
}

TEST_CASE("rho_estimate input guards") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);
  const Cap cap{u, 0.5};

  RhoParams empty;
  CHECK_THROWS_AS(rho_estimate(mu, cap, cover3(), empty), ConfigError);

  RhoParams flat;
  flat.radii = {0.1, 0.1};
  CHECK_THROWS_AS(rho_estimate(mu, cap, cover3(), flat), ConfigError);

  RhoParams wide;
  wide.radii = {0.6};
  CHECK_THROWS_AS(rho_estimate(mu, cap, cover3(), wide), ConfigError);

  RhoParams noisy;
  noisy.radii = {0.2, 0.03};
  CHECK_THROWS_AS(rho_estimate(mu, cap, cover3(), noisy), UnreliableInputError);

  const OccupationMeasure planar = point_measure({0.0, 1.0}, 1000);
  const CoverHierarchy circle = build_cover(2, 3);
  RhoParams ok;
  ok.radii = {0.3};
  Cap cap2{{0.0, 1.0}, 0.5};
  CHECK_THROWS_AS(rho_estimate(planar, cap2, circle, ok), ConfigError);
  CHECK_THROWS_AS(rho_estimate(planar, cap2, cover3(), ok), ConfigError);
}

TEST_CASE("radial_level_sets spikes at the mass direction and vanishes elsewhere") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);
  PsiParams params;
  params.j_range = {2, 3};

  const std::vector<PointCloud> sets = radial_level_sets(mu, cover3(), params);
  REQUIRE(sets.size() == 2);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const int j = params.j_range[s];
    CHECK(sets[s].dim == 3);
    CHECK(sets[s].n() == cover3().n_points(j));
  }

  // The deepest usable sub-cap has radius 2^-4, giving the peak norm; it sits
  // at a cover point near the mass direction.
  for (const PointCloud& a_j : sets) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < a_j.n(); ++i) {
      const double n_i = norm(a_j.point(i), 3);
      if (n_i > best) {
        best = n_i;
        arg = i;
      }
    }
    CHECK(best == doctest::Approx(point_rho(0.0625)).epsilon(1e-9));
    const double* p = a_j.point(arg);
    CHECK(p[2] / best >= 0.96);
  }
}

TEST_CASE("radial_level_sets input guards") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);

  PsiParams empty;
  CHECK_THROWS_AS(radial_level_sets(mu, cover3(), empty), ConfigError);

  PsiParams deep;
  deep.j_range = {5};
  CHECK_THROWS_AS(radial_level_sets(mu, cover3(), deep), ConfigError);

  PsiParams zero;
  zero.j_range = {0};
  CHECK_THROWS_AS(radial_level_sets(mu, cover3(), zero), ConfigError);

  PsiParams ok;
  ok.j_range = {2};
  const OccupationMeasure sparse = point_measure(u, 4);
  CHECK_THROWS_AS(radial_level_sets(sparse, cover3(), ok), UnreliableInputError);
}

TEST_CASE("reconstruct_range_psi keeps the spike through the tail intersection") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);
  PsiParams params;
  params.j_range = {2, 3};
  params.limsup_tol = 1.0;

  const PointCloud psi = reconstruct_range_psi(mu, cover3(), params);
  REQUIRE(psi.n() > 0);
  CHECK(cloud_max_norm(psi) >= 3.5);
}

TEST_CASE("recover_endpoint reports inconclusive on a degenerate spike measure") {
  const std::vector<double> u{0.0, 0.0, 1.0};
  const OccupationMeasure mu = point_measure(u, 10000);
  PsiParams psi_params;
  psi_params.j_range = {2, 3};
  psi_params.limsup_tol = 1.0;
  // Two disjoint pieces of extent 0.85 cannot fit inside this quasi-linear
  // cloud, so the cut search must come back empty.
  EndpointParams endpoint_params;
  endpoint_params.delta_schedule = {0.9, 0.85};
  endpoint_params.phi_level = 3;

  const RecoveryReport report = recover_endpoint(mu, cover3(), psi_params, endpoint_params);
  CHECK(report.inconclusive);
  CHECK_FALSE(report.endpoint_estimate.has_value());
  CHECK(report.psi_cloud.n() > 0);
}

namespace {

SamplePath straight_path3(double length, std::uint32_t n_steps) {
  SamplePath p;
  p.grid = TimeGrid{1.0, n_steps};
  p.dim = 3;
  for (std::uint32_t k = 0; k <= n_steps; ++k) {
    p.points.push_back(length * static_cast<double>(k) / static_cast<double>(n_steps));
    p.points.push_back(0.0);
    p.points.push_back(0.0);
  }
  return p;
}

}  // namespace

TEST_CASE("recover_endpoint_oracle finds the free end of a straight path") {
  const SamplePath path = straight_path3(2.0, 2000);
  EndpointParams params;
  params.delta_schedule = {0.25, 0.125};
  params.phi_level = 4;

  RecoveryReport report = recover_endpoint_oracle(path, 0.004, params);
  REQUIRE_FALSE(report.inconclusive);
  REQUIRE(report.endpoint_estimate.has_value());
  CHECK(report.scale == doctest::Approx(2.04));
  CHECK(report.n_candidates >= 1);

  const PointCloud truth = cloud_from_path(path);
  evaluate_against_truth(report, truth, {2.0, 0.0, 0.0});
  CHECK(report.truth_diameter == doctest::Approx(2.0));
  CHECK(report.hausdorff_to_truth <= 1e-12);
  CHECK(report.endpoint_error <= 0.05);
}

TEST_CASE("recover_endpoint_oracle inconclusive paths") {
  const SamplePath path = straight_path3(2.0, 2000);

  // Deltas too large for the rescaled geometry: no qualified cuts anywhere.
  EndpointParams coarse;
  coarse.delta_schedule = {0.6};
  coarse.phi_level = 4;
  const RecoveryReport none = recover_endpoint_oracle(path, 0.004, coarse);
  CHECK(none.inconclusive);
  CHECK_FALSE(none.endpoint_estimate.has_value());

  // Gap tolerance below the sampling resolution.
  EndpointParams params;
  params.delta_schedule = {0.25, 0.125};
  params.phi_level = 4;
  const RecoveryReport unreliable = recover_endpoint_oracle(path, 0.0004, params);
  CHECK(unreliable.inconclusive);
}

TEST_CASE("evaluate_against_truth leaves unset fields at their sentinels") {
  RecoveryReport report;
  PointCloud truth;
  truth.dim = 3;
  double p[3] = {0.0, 0.0, 0.0};
  double q[3] = {1.0, 0.0, 0.0};
  truth.push(p);
  truth.push(q);

  evaluate_against_truth(report, truth, {1.0, 0.0, 0.0});
  CHECK(report.truth_diameter == doctest::Approx(1.0));
  CHECK(report.hausdorff_to_truth == -1.0);
  CHECK(report.endpoint_error == -1.0);
}

TEST_CASE("thick_points_statistic separates a cluster from uniform noise") {
  Rng rng(RngStreamSpec{77001, 0});
  const std::size_t n = 1u << 16;

  PointCloud uniform;
  uniform.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    double p[2];
    do {
      p[0] = 2.0 * rng.uniform() - 1.0;
      p[1] = 2.0 * rng.uniform() - 1.0;
    } while (p[0] * p[0] + p[1] * p[1] > 1.0);
    uniform.push(p);
  }
  const ThickPointsResult control = thick_points_statistic(uniform, {0.00390625});
  REQUIRE(control.profile.size() == 1);
  CHECK(control.statistic > 0.0);
  CHECK(control.statistic < 0.5);

  PointCloud clustered;
  clustered.dim = 2;
  const std::size_t n_spike = 5000;
  for (std::size_t i = 0; i < n_spike; ++i) {
    double p[2] = {0.3, 0.3};
    clustered.push(p);
  }
  for (std::size_t i = n_spike; i < n; ++i) {
    double p[2];
    do {
      p[0] = 2.0 * rng.uniform() - 1.0;
      p[1] = 2.0 * rng.uniform() - 1.0;
    } while (p[0] * p[0] + p[1] * p[1] > 1.0);
    clustered.push(p);
  }
  const ThickPointsResult spiked = thick_points_statistic(clustered, {0.03125, 0.015625});
  REQUIRE(spiked.profile.size() == 2);
  CHECK(spiked.statistic > 5.0);
  CHECK(spiked.statistic < 60.0);
  CHECK(spiked.statistic ==
        std::max(spiked.profile[0].second, spiked.profile[1].second));
}

TEST_CASE("thick_points_statistic input guards") {
  PointCloud planar;
  planar.dim = 2;
  Rng rng(RngStreamSpec{77002, 0});
  for (std::size_t i = 0; i < (1u << 16); ++i) {
    double p[2] = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    planar.push(p);
  }

  CHECK_THROWS_AS(thick_points_statistic(planar, {}), ConfigError);
  CHECK_THROWS_AS(thick_points_statistic(planar, {1.0}), ConfigError);
  CHECK_THROWS_AS(thick_points_statistic(planar, {0.0}), ConfigError);

  PointCloud short_cloud;
  short_cloud.dim = 2;
  for (std::size_t i = 0; i < 100; ++i) {
    double p[2] = {rng.uniform(), rng.uniform()};
    short_cloud.push(p);
  }
  CHECK_THROWS_AS(thick_points_statistic(short_cloud, {0.0625}), ConfigError);

  PointCloud spatial;
  spatial.dim = 3;
  for (std::size_t i = 0; i < (1u << 16); ++i) {
    double p[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
    spatial.push(p);
  }
  CHECK_THROWS_AS(thick_points_statistic(spatial, {0.0625}), ConfigError);
}
