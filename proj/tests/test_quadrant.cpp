#include "occlab/quadrant.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "occlab/errors.hpp"
#include "doctest.h"

using namespace occlab;

namespace {
const ExecPolicy kSerial{1};
}

TEST_CASE("exact minimum laws match frozen references") {
  // Values frozen from an independent high-precision evaluation.
  auto [f1, s1] = min_law_exact(0.05);
  CHECK(f1 == doctest::Approx(0.039877611676744925).epsilon(1e-12));
  CHECK(s1 == doctest::Approx(4.9774399715941736e-5).epsilon(1e-10));
  auto [f2, s2] = min_law_exact(0.1);
  CHECK(f2 == doctest::Approx(0.079655674554057967).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(0.00039596511495493995).epsilon(1e-10));
  auto [f3, s3] = min_law_exact(0.2);
  CHECK(f3 == doctest::Approx(0.15851941887820605).epsilon(1e-12));
  CHECK(s3 == doctest::Approx(0.0030976772678818799).epsilon(1e-10));
  CHECK_THROWS_AS(min_law_exact(0.0), std::domain_error);
}

TEST_CASE("minimum laws approach their small-delta orders") {
  const double root_2_over_pi = std::sqrt(2.0 / std::numbers::pi);
  const double inv_root_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto [first_tiny, second_tiny] = min_law_exact(0.001);
  CHECK(first_tiny == doctest::Approx(0.00079788442782212519).epsilon(1e-10));
  CHECK(first_tiny / 0.001 == doctest::Approx(root_2_over_pi).epsilon(1e-3));
  auto [first_small, second_small] = min_law_exact(0.01);
  CHECK(second_small == doctest::Approx(3.9891236122637728e-7).epsilon(1e-9));
  CHECK(second_small / (0.01 * 0.01 * 0.01) == doctest::Approx(inv_root_2pi).epsilon(1e-3));
}

TEST_CASE("quadrant trial rejects out-of-range windows") {
  CHECK_THROWS_AS(run_quadrant_trial(0.2, 100, 1024, 1, kSerial), ConfigError);
  CHECK_THROWS_AS(run_quadrant_trial(0.0, 100, 1024, 1, kSerial), ConfigError);
  CHECK_THROWS_AS(run_quadrant_trial(0.1, 100, 512, 1, kSerial), ConfigError);
  CHECK_THROWS_AS(run_quadrant_trial(0.1, 0, 1024, 1, kSerial), ConfigError);
}

TEST_CASE("quadrant trial counts are internally consistent") {
  const double eps = 1.0 / 6.0;
  const QuadrantTrialResult res = run_quadrant_trial(eps, 30000, 1024, 424242, kSerial);
  CHECK(res.epsilon == eps);
  CHECK(res.n_paths == 30000);
  CHECK(res.hits > 50);  // the widest window is hit a fraction of a percent of the time
  CHECK(res.hits < 3000);
  CHECK(res.joint_q3 + res.endpoint_q2 + res.endpoint_q4 <= res.hits);
  CHECK(res.hits_first_half <= res.hits);
  CHECK(res.p_hit() == doctest::Approx(static_cast<double>(res.hits) / 30000.0));
  // Conditioning traps the quadrant-3 mass inside the window.
  const double m = res.mean_mass_q3_given_hit();
  CHECK(m >= eps - 1e-9);
  CHECK(m <= 2.0 * eps + 1e-9);
  const double cond = res.conditional_q3();
  const Interval w = res.conditional_q3_wilson();
  CHECK(w.lo <= cond);
  CHECK(cond <= w.hi);
}

TEST_CASE("quadrant trials replay byte-identically for a fixed seed") {
  const QuadrantTrialResult a = run_quadrant_trial(0.125, 8000, 1024, 5150, kSerial);
  const QuadrantTrialResult b = run_quadrant_trial(0.125, 8000, 1024, 5150, kSerial);
  CHECK(a.hits == b.hits);
  CHECK(a.joint_q3 == b.joint_q3);
  CHECK(a.endpoint_q2 == b.endpoint_q2);
  CHECK(a.endpoint_q4 == b.endpoint_q4);
  CHECK(a.occupancy_q3_steps == b.occupancy_q3_steps);
}

TEST_CASE("scan rows agree with single-window trials on shared seeds") {
  const std::vector<double> eps = {0.1, 1.0 / 6.0};
  const ScalingScan scan = scaling_scan(eps, 30000, 1024, 424242, kSerial);
  REQUIRE(scan.rows.size() == 2);
  const QuadrantTrialResult solo = run_quadrant_trial(1.0 / 6.0, 30000, 1024, 424242, kSerial);
  CHECK(scan.rows[1].trial.hits == solo.hits);
  CHECK(scan.rows[1].trial.joint_q3 == solo.joint_q3);
  CHECK(scan.rows[1].trial.occupancy_q3_steps == solo.occupancy_q3_steps);
  // Wider windows are hit more often.
  CHECK(scan.rows[1].trial.hits > scan.rows[0].trial.hits);
  // The hit probability decays superlinearly in the window width; at this
  // size the estimate is noisy, so only the sign and rough order are pinned.
  CHECK(scan.slope_hit > 0.5);
  CHECK_THROWS_AS(scaling_scan({0.1}, 100, 1024, 1, kSerial), ConfigError);
}

TEST_CASE("grid minimum frequencies match the exact laws within slack") {
  const MinLawCheck check = min_law_mc_check({0.1, 0.2}, 20000, 4096, 626262, kSerial);
  REQUIRE(check.rows.size() == 2);
  CHECK(check.verdict.passed);
  for (const MinLawCheckRow& row : check.rows) {
    CHECK(row.empirical_first > 0.0);
    // The grid minimum overshoots the continuum minimum, never undershoots.
    CHECK(row.empirical_first >= row.exact_first - 3.0 * row.se_first);
    CHECK(row.se_first > 0.0);
    CHECK(row.se_second > 0.0);
  }
  CHECK_THROWS_AS(min_law_mc_check({}, 100, 64, 1, kSerial), ConfigError);
  CHECK_THROWS_AS(min_law_mc_check({-0.1}, 100, 64, 1, kSerial), ConfigError);
}
