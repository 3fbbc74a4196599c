#include "occlab/occupation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "occlab/geom.hpp"
#include "occlab/rng.hpp"
#include "doctest.h"

using namespace occlab;

TEST_CASE("quadrant assignment is clockwise with half-open boundaries") {
  CHECK(quadrant_of(1.0, 1.0) == 0);
  CHECK(quadrant_of(1.0, -1.0) == 1);
  CHECK(quadrant_of(-1.0, -1.0) == 2);
  CHECK(quadrant_of(-1.0, 1.0) == 3);
  // Boundary rays: each belongs to exactly one quadrant.
  CHECK(quadrant_of(0.0, 1.0) == 0);   // +y axis
  CHECK(quadrant_of(1.0, 0.0) == 1);   // +x axis
  CHECK(quadrant_of(0.0, -1.0) == 2);  // -y axis
  CHECK(quadrant_of(-1.0, 0.0) == 3);  // -x axis
  CHECK(quadrant_of(0.0, 0.0) == 0);   // origin
}

TEST_CASE("every point lands in exactly one quadrant") {
  Rng rng(31, 0);
  for (int t = 0; t < 10000; ++t) {
    const double x = 2.0 * rng.uniform() - 1.0;
    const double y = 2.0 * rng.uniform() - 1.0;
    const int q = quadrant_of(x, y);
    CHECK(q >= 0);
    CHECK(q <= 3);
  }
}

TEST_CASE("quadrant occupations on a hand-built square loop") {
  // Path visits the four open quadrants once each, then returns; the final
  // point is excluded by the left-endpoint rule.
  SamplePath path;
  path.dim = 2;
  path.grid = TimeGrid{1.0, 4};
  path.points = {1.0, 1.0,  1.0, -1.0,  -1.0, -1.0,  -1.0, 1.0,  9.0, 9.0};
  const std::array<double, 4> occ = quadrant_occupations(path);
  for (int q = 0; q < 4; ++q) CHECK(occ[q] == doctest::Approx(0.25));
}

TEST_CASE("quadrant occupations sum to one on random paths") {
  const TimeGrid grid{1.0, 512};
  for (std::uint64_t r = 0; r < 50; ++r) {
    Rng rng(32, r);
    const SamplePath path = simulate_bm(2, grid, rng);
    const std::array<double, 4> occ = quadrant_occupations(path);
    CHECK(occ[0] + occ[1] + occ[2] + occ[3] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SamplePath bad;
  bad.dim = 3;
  bad.grid = TimeGrid{1.0, 1};
  bad.points = {0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(quadrant_occupations(bad), std::invalid_argument);
}

TEST_CASE("occupation measure carries uniform weights over chosen endpoints") {
  const TimeGrid grid{1.0, 16};
  Rng rng(33, 0);
  const SamplePath path = simulate_bm(3, grid, rng);
  const SpherePath sp = spherical_project(path, default_zero_convention(3));

  const OccupationMeasure left = occupation_measure(sp);
  REQUIRE(left.n_atoms() == 16);
  CHECK(left.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(left.weights[i] == doctest::Approx(1.0 / 16.0));
    for (int c = 0; c < 3; ++c) {
      CHECK(left.direction(i)[c] == sp.direction(static_cast<std::uint32_t>(i))[c]);
    }
  }

  const OccupationMeasure right = occupation_measure(sp, QuadratureRule::kRightEndpoint);
  REQUIRE(right.n_atoms() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    for (int c = 0; c < 3; ++c) {
      CHECK(right.direction(i)[c] == sp.direction(static_cast<std::uint32_t>(i) + 1)[c]);
    }
  }
}

TEST_CASE("cap mass agrees with direct summation") {
  const TimeGrid grid{1.0, 2048};
  Rng rng(34, 1);
  const SamplePath path = simulate_bm(3, grid, rng);
  const SpherePath sp = spherical_project(path, default_zero_convention(3));
  const OccupationMeasure mu = occupation_measure(sp);

  Rng probe_rng(34, 2);
  for (int t = 0; t < 25; ++t) {
    double c[3];
    double s = 0.0;
    for (double& x : c) {
      x = probe_rng.gaussian();
    }
    s = norm(c, 3);
    Cap cap;
    cap.center = {c[0] / s, c[1] / s, c[2] / s};
    cap.radius = 0.1 + 1.4 * probe_rng.uniform();
    double direct = 0.0;
    for (std::size_t i = 0; i < mu.n_atoms(); ++i) {
      if (dist(mu.direction(i), cap.center.data(), 3) <= cap.radius) direct += mu.weights[i];
    }
    CHECK(cap_mass(mu, cap) == doctest::Approx(direct).epsilon(1e-12));
  }

  Cap wrong_dim;
  wrong_dim.center = {1.0, 0.0};
  CHECK_THROWS_AS(cap_mass(mu, wrong_dim), std::invalid_argument);

  // The whole sphere fits in a chordal ball of radius 2.
  Cap everything;
  everything.center = {0.0, 0.0, 1.0};
  everything.radius = 2.0;
  CHECK(cap_mass(mu, everything) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional curve bins mass-hit pairs") {
  std::vector<std::pair<double, double>> pairs = {
      {0.05, 1.0}, {0.05, 0.0}, {0.55, 1.0}, {0.55, 1.0}, {0.95, 0.0}};
  const BinnedCurve curve = conditional_given_cap_mass(pairs, 10);
  CHECK(curve.count(0) == 2);
  CHECK(curve.mean(0) == doctest::Approx(0.5));
  CHECK(curve.count(5) == 2);
  CHECK(curve.mean(5) == doctest::Approx(1.0));
  CHECK(curve.count(9) == 1);
  CHECK_THROWS_AS(conditional_given_cap_mass({}, 10), std::invalid_argument);
}
