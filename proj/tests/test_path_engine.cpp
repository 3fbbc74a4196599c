#include "occlab/path_engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "occlab/geom.hpp"
#include "occlab/stats.hpp"
#include "doctest.h"

using namespace occlab;

TEST_CASE("time grid validates and indexes") {
  TimeGrid grid{1.0, 4};
  CHECK_NOTHROW(grid.validate());
  CHECK(grid.dt() == doctest::Approx(0.25));
  CHECK(grid.time(0) == doctest::Approx(0.0));
  CHECK(grid.time(4) == doctest::Approx(1.0));
  CHECK(grid.n_points() == 5);
  CHECK_THROWS_AS((TimeGrid{0.0, 4}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((TimeGrid{1.0, 0}).validate(), std::invalid_argument);
}

TEST_CASE("brownian paths start at zero and have brownian marginals") {
  const TimeGrid grid{1.0, 256};
  const std::uint64_t n = 20000;
  std::vector<double> end(n), mid(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    Rng rng(11, r);
    const SamplePath path = simulate_bm(1, grid, rng);
    REQUIRE(path.points.size() == 257);
    CHECK(path.coord(0, 0) == 0.0);
    end[r] = path.coord(256, 0);
    mid[r] = path.coord(128, 0);
  }
  const SummaryStats se = summarize(end);
  CHECK(std::abs(se.mean) < 4.0 * se.std_error);
  CHECK(se.variance == doctest::Approx(1.0).epsilon(0.05));
  CHECK(ks_distance(end, [](double x) { return normal_cdf(x); }) < 0.015);
  CHECK(ks_distance(mid, [](double x) { return normal_cdf(x / std::sqrt(0.5)); }) < 0.015);
}

TEST_CASE("multidimensional brownian coordinates are independent") {
  const TimeGrid grid{1.0, 64};
  const std::uint64_t n = 20000;
  double cross = 0.0, var0 = 0.0, var1 = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    Rng rng(12, r);
    const SamplePath path = simulate_bm(3, grid, rng);
    const double* p = path.point(64);
    cross += p[0] * p[1];
    var0 += p[0] * p[0];
    var1 += p[1] * p[1];
  }
  cross /= static_cast<double>(n);
  var0 /= static_cast<double>(n);
  var1 /= static_cast<double>(n);
  CHECK(var0 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(var1 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(cross) < 0.05);
}

TEST_CASE("walker and simulate_bm consume the stream identically") {
  const TimeGrid grid{1.0, 32};
  Rng rng_a(13, 5);
  const SamplePath path = simulate_bm(2, grid, rng_a);
  Rng rng_b(13, 5);
  BrownianWalker walker(2, grid, rng_b);
  double pos[2] = {0.0, 0.0};
  for (std::uint32_t k = 0; k < 32; ++k) {
    walker.step(pos);
    CHECK(pos[0] == path.coord(k + 1, 0));
    CHECK(pos[1] == path.coord(k + 1, 1));
  }
}

TEST_CASE("spherical projection yields unit directions with the convention at zero") {
  const TimeGrid grid{1.0, 128};
  Rng rng(14, 0);
  const SamplePath path = simulate_bm(3, grid, rng);
  const SpherePath sp = spherical_project(path, default_zero_convention(3));
  REQUIRE(sp.directions.size() == 129 * 3);
  CHECK(sp.direction(0)[0] == doctest::Approx(1.0));
  CHECK(sp.direction(0)[1] == doctest::Approx(0.0));
  for (std::uint32_t k = 0; k <= 128; ++k) {
    CHECK(norm(sp.direction(k), 3) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::uint32_t k = 1; k <= 128; ++k) {
    const double r = norm(path.point(k), 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(sp.direction(k)[i] == doctest::Approx(path.point(k)[i] / r).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(spherical_project(path, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(spherical_project(path, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("perturbed path with mu one is the negated brownian path") {
  const TimeGrid grid{1.0, 64};
  Rng rng_a(15, 3);
  const SamplePath y = simulate_perturbed_bm(1.0, grid, rng_a);
  Rng rng_b(15, 3);
  const SamplePath b = simulate_bm(1, grid, rng_b);
  for (std::uint32_t k = 0; k <= 64; ++k) {
    CHECK(y.coord(k, 0) == -b.coord(k, 0));
  }
  CHECK_THROWS_AS(simulate_perturbed_bm(0.0, grid, rng_a), std::invalid_argument);
}

TEST_CASE("perturbed path mixes the running maximum as specified") {
  const TimeGrid grid{1.0, 64};
  const double mu = 0.5;
  Rng rng_a(16, 9);
  const SamplePath y = simulate_perturbed_bm(mu, grid, rng_a);
  Rng rng_b(16, 9);
  const SamplePath b = simulate_bm(1, grid, rng_b);
  double running_max = 0.0;
  for (std::uint32_t k = 0; k <= 64; ++k) {
    running_max = std::max(running_max, b.coord(k, 0));
    CHECK(y.coord(k, 0) ==
          doctest::Approx((1.0 - mu) * running_max - b.coord(k, 0)).epsilon(1e-12));
  }
}

TEST_CASE("angle laws sample their atoms with the right frequencies") {
  const AngleLaw law = AngleLaw::discrete({0.5, 2.0, 4.0}, {0.5, 0.3, 0.2});
  CHECK(law.is_discrete());
  CHECK(law.prob_of(2.0) == doctest::Approx(0.3));
  Rng rng(17, 0);
  std::vector<std::uint64_t> counts(3, 0);
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double a = law.sample(rng);
    if (a == 0.5) ++counts[0];
    else if (a == 2.0) ++counts[1];
    else if (a == 4.0) ++counts[2];
    else FAIL("sample produced a non-atom");
  }
  const ChiSquareResult r = chi_square_goodness(counts, {0.5, 0.3, 0.2});
  CHECK(r.p_value > 1e-4);

  CHECK_THROWS_AS(AngleLaw::discrete({0.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(AngleLaw::discrete({0.5, 7.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(AngleLaw::discrete({0.5, 1.0}, {0.6, 0.6}), std::invalid_argument);

  const AngleLaw unif = AngleLaw::uniform();
  CHECK_FALSE(unif.is_discrete());
  for (int i = 0; i < 1000; ++i) {
    const double a = unif.sample(rng);
    CHECK(a >= 0.0);
    CHECK(a < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("walsh angles are constant on sign runs and masked at switches") {
  const TimeGrid grid{1.0, 2048};
  const AngleLaw law = AngleLaw::discrete({0.5, 2.0, 4.0}, {0.5, 0.3, 0.2});
  Rng rng_a(18, 21);
  const AngleProcess proc = simulate_walsh_angles(grid, law, rng_a);
  Rng rng_b(18, 21);
  const SamplePath b = simulate_bm(1, grid, rng_b);
  REQUIRE(proc.angles.size() == 2049);
  REQUIRE(proc.zero_set_mask.size() == 2049);
  CHECK(proc.zero_set_mask[0] == 1);
  int switches = 0;
  for (std::uint32_t k = 1; k <= 2048; ++k) {
    const bool flip = k >= 2 && b.coord(k, 0) * b.coord(k - 1, 0) < 0.0;
    if (flip) ++switches;
    if (proc.zero_set_mask[k]) continue;
    // Unmasked points in one run share one angle.
    if (k >= 2 && !proc.zero_set_mask[k - 1] && !flip) {
      CHECK(proc.angle_at(k) == proc.angle_at(k - 1));
    }
  }
  CHECK(switches > 0);
  CHECK(proc.run_angles.size() >= 2);
  // Endpoint angle is always resolvable and is an atom.
  const double end_angle = proc.angle_at(2048);
  CHECK((end_angle == 0.5 || end_angle == 2.0 || end_angle == 4.0));
}

TEST_CASE("stable parameter validation") {
  const TimeGrid grid{1.0, 8};
  Rng rng(19, 0);
  CHECK_THROWS_AS(simulate_stable_levy(0.0, 0.0, grid, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_stable_levy(2.1, 0.0, grid, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_stable_levy(1.5, 1.5, grid, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate_stable_levy(1.0, 0.5, grid, rng), std::invalid_argument);
  CHECK_NOTHROW(simulate_stable_levy(1.0, 0.0, grid, rng));
}

TEST_CASE("stable path at alpha two is brownian with variance 2t") {
  const TimeGrid grid{1.0, 32};
  const std::uint64_t n = 40000;
  std::vector<double> end(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    Rng rng(20, r);
    const SamplePath path = simulate_stable_levy(2.0, 0.0, grid, rng);
    end[r] = path.coord(32, 0);
  }
  const SummaryStats s = summarize(end);
  CHECK(std::abs(s.mean) < 4.0 * s.std_error);
  CHECK(s.variance == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ks_distance(end, [](double x) { return normal_cdf(x / std::sqrt(2.0)); }) < 0.012);
}

TEST_CASE("stable positivity matches references and symmetry") {
  CHECK(stable_positivity(2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stable_positivity(1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stable_positivity(1.5, 0.5) == doctest::Approx(0.40161092156637782).epsilon(1e-12));
  CHECK(stable_positivity(1.2, -0.8) == doctest::Approx(0.81433096495651389).epsilon(1e-12));
  CHECK(stable_positivity(0.7, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stable_positivity(1.5, 0.5) + stable_positivity(1.5, -0.5) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stable positivity matches the simulated sign frequency") {
  const TimeGrid grid{1.0, 1};
  const double alpha = 1.5, beta = 0.5;
  const double p = stable_positivity(alpha, beta);
  std::uint64_t up = 0;
  const std::uint64_t n = 200000;
  for (std::uint64_t r = 0; r < n; ++r) {
    Rng rng(21, r);
    const SamplePath path = simulate_stable_levy(alpha, beta, grid, rng);
    if (path.coord(1, 0) > 0.0) ++up;
  }
  const double hat = static_cast<double>(up) / static_cast<double>(n);
  CHECK(std::abs(hat - p) < 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
}

TEST_CASE("dirichlet angle process paints right-to-left sticks") {
  const TimeGrid grid{1.0, 4096};
  const AngleLaw law = AngleLaw::discrete({0.5, 2.0, 4.0}, {0.5, 0.3, 0.2});
  Rng rng(22, 4);
  const AngleProcess proc = simulate_dirichlet_angle_process(1.0, law, grid, rng);
  REQUIRE(proc.angles.size() == 4097);
  // The endpoint belongs to the first stick and must be an atom.
  const double end_angle = proc.angle_at(4096);
  CHECK((end_angle == 0.5 || end_angle == 2.0 || end_angle == 4.0));
  // Runs are intervals indexed from the left, so the run index is
  // nondecreasing in time; adjacent unmasked points share one angle.
  for (std::uint32_t k = 1; k <= 4096; ++k) {
    CHECK(proc.run_of[k] >= proc.run_of[k - 1]);
    if (proc.zero_set_mask[k] || proc.zero_set_mask[k - 1]) continue;
    CHECK(proc.angle_at(k) == proc.angle_at(k - 1));
  }
  CHECK_THROWS_AS(simulate_dirichlet_angle_process(0.0, law, grid, rng),
                  std::invalid_argument);
}

TEST_CASE("excursion counter on hand-worked zero sets") {
  // Zeros at 0, 0.2, 0.5; gaps up to t are measured against t - G_t.
  const std::vector<double> zeros = {0.0, 0.2, 0.5};
  // t = 0.6: G_t = 0.5, t - G_t = 0.1; closed gaps are 0.2 and 0.3, both
  // exceed 0.1, so N = 2 + 1.
  CHECK(excursion_count(zeros, 0.6) == 3);
  // t = 0.7: t - G_t = 0.2; the gap of length 0.2 ties and is excluded
  // (strict inequality) while 0.3 still counts.
  CHECK(excursion_count(zeros, 0.7) == 2);
  // t = 1.0: t - G_t = 0.5; neither gap exceeds it.
  CHECK(excursion_count(zeros, 1.0) == 1);
  // t right after a zero: everything before counts.
  CHECK(excursion_count(zeros, 0.51) == 3);
  // Single zero at the origin.
  CHECK(excursion_count({0.0}, 0.7) == 1);
  CHECK_THROWS_AS(excursion_count({0.1, 0.2}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(excursion_count({0.0, 0.4, 0.3}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(excursion_count({0.0, 1.2}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(excursion_count(zeros, 0.0), std::invalid_argument);
}
