#include "occlab/sampling_laws.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "occlab/errors.hpp"
#include "occlab/stats.hpp"
#include "doctest.h"

using namespace occlab;

namespace {
const ExecPolicy kSerial{1};
}

TEST_CASE("beta law cdf wraps the regularized incomplete beta") {
  const BetaLaw law{1.5, 0.5};
  CHECK(beta_law_cdf(law, 0.5) == doctest::Approx(beta_cdf(1.5, 0.5, 0.5)).epsilon(1e-15));
  CHECK(beta_law_cdf(law, 0.0) == 0.0);
  CHECK(beta_law_cdf(law, 1.0) == 1.0);
  CHECK_THROWS_AS(beta_law_cdf(law, -0.1), std::domain_error);
  CHECK_THROWS_AS(beta_law_cdf(law, 1.1), std::domain_error);
}

TEST_CASE("diagonal regression passes when the identity holds by construction") {
  // mass ~ U(0,1), hit | mass ~ Bernoulli(mass): the conditional mean is the
  // diagonal exactly, so the check must pass with room to spare.
  const MassEndpointSampler honest = [](Rng& rng) {
    MassEndpoint s;
    s.mass = rng.uniform();
    s.hit = rng.uniform() < s.mass ? 1.0 : 0.0;
    return s;
  };
  const SamplingIdentityResult res =
      sampling_identity_check(honest, 40000, 20, 901, kSerial, 0.02, 100);
  CHECK(res.verdict.passed);
  CHECK_FALSE(res.verdict.inconclusive);
  CHECK(res.qualifying_bins == 20);
  CHECK(res.verdict.name == "diagonal-regression");
}

TEST_CASE("diagonal regression flags a biased sampler") {
  const MassEndpointSampler biased = [](Rng& rng) {
    MassEndpoint s;
    s.mass = rng.uniform();
    s.hit = rng.uniform() < std::min(1.0, s.mass + 0.15) ? 1.0 : 0.0;
    return s;
  };
  const SamplingIdentityResult res =
      sampling_identity_check(biased, 40000, 20, 902, kSerial, 0.02, 100);
  CHECK_FALSE(res.verdict.passed);
  CHECK_FALSE(res.verdict.inconclusive);
}

TEST_CASE("diagonal regression reports inconclusive when bins never fill") {
  const MassEndpointSampler honest = [](Rng& rng) {
    MassEndpoint s;
    s.mass = rng.uniform();
    s.hit = 0.0;
    return s;
  };
  const SamplingIdentityResult res =
      sampling_identity_check(honest, 50, 20, 903, kSerial, 0.02, 100);
  CHECK(res.verdict.inconclusive);
  CHECK_FALSE(res.verdict.passed);
  CHECK_THROWS_AS(sampling_identity_check(honest, 0, 20, 904, kSerial, 0.02, 100), ConfigError);
  CHECK_THROWS_AS(sampling_identity_check(honest, 50, 1, 905, kSerial, 0.02, 100), ConfigError);
}

TEST_CASE("occupation fractions of brownian motion follow the arcsine family") {
  const LevyBetaResult res =
      levy_beta_conditionals(2.0, 0.0, 4000, 4096, 906, kSerial, 0.05, 0.06);
  CHECK(res.positivity == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.unconditional.passed);
  CHECK(res.given_positive.passed);
  CHECK(res.given_negative.passed);
}

TEST_CASE("one-sided stable processes are rejected as degenerate") {
  CHECK_THROWS_AS(levy_beta_conditionals(0.7, 1.0, 100, 64, 907, kSerial, 0.05, 0.05),
                  ConfigError);
}

TEST_CASE("perturbed occupation fractions follow the tilted beta family") {
  const PerturbedBetaResult res = perturbed_beta_check(1.0, 4000, 4096, 908, kSerial, 0.05, 0.06);
  CHECK(res.time_below.passed);
  CHECK(res.given_negative.passed);
  CHECK(res.given_positive.passed);
  CHECK_THROWS_AS(perturbed_beta_check(0.0, 100, 64, 909, kSerial, 0.05, 0.05), ConfigError);
}

TEST_CASE("two-point switch process matches its closed-form statistics") {
  const ConverseExampleResult res = converse_example_stats(1.0 / 3.0, 200000, 910, kSerial);
  CHECK(res.exact_end_vs_uniform == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(res.exact_uniform_pair == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK(std::abs(res.empirical_end_vs_uniform - res.exact_end_vs_uniform) <
        4.0 * res.se_end_vs_uniform);
  CHECK(std::abs(res.empirical_uniform_pair - res.exact_uniform_pair) <
        4.0 * res.se_uniform_pair);
  CHECK(res.verdict.n_samples == 200000);
  CHECK_THROWS_AS(converse_example_stats(0.0, 100, 911, kSerial), ConfigError);
  CHECK_THROWS_AS(converse_example_stats(1.0, 100, 911, kSerial), ConfigError);
  CHECK_THROWS_AS(converse_example_stats(0.5, 0, 911, kSerial), ConfigError);
}

TEST_CASE("walsh tuples are exchangeable under the homogeneity test") {
  const TimeGrid grid{1.0, 1024};
  const CategoricalProcessSampler sampler =
      walsh_categorical_sampler(grid, {0.5, 2.0, 4.0}, {0.5, 0.3, 0.2});
  CHECK(sampler.n_categories == 3);
  const ExchangeabilityResult res =
      exchangeability_chi_square(sampler, 2, 4000, 912, kSerial, 0.01, 4096);
  CHECK(res.non_rejection.passed);
  CHECK(res.chi.df > 0.0);
}

TEST_CASE("the switch process fails the homogeneity test") {
  const CategoricalProcessSampler sampler = converse_categorical_sampler(1.0 / 3.0);
  CHECK(sampler.n_categories == 2);
  const ExchangeabilityResult res =
      exchangeability_chi_square(sampler, 2, 4000, 913, kSerial, 0.01, 4096);
  CHECK_FALSE(res.non_rejection.passed);
}

TEST_CASE("exchangeability guards its inputs") {
  const CategoricalProcessSampler sampler = converse_categorical_sampler(0.5);
  CHECK_THROWS_AS(exchangeability_chi_square(sampler, 1, 100, 914, kSerial, 0.01, 4096),
                  ConfigError);
  CHECK_THROWS_AS(exchangeability_chi_square(sampler, 13, 100, 914, kSerial, 0.01, 4096),
                  ConfigError);  // 2^13 cells exceed the budget
  CHECK_THROWS_AS(converse_categorical_sampler(0.0), ConfigError);
  CHECK_THROWS_AS(walsh_categorical_sampler(TimeGrid{1.0, 16}, {0.5}, {1.0}), ConfigError);
}

TEST_CASE("stationary weight discrepancies match frozen references") {
  WeightLaw delta0{WeightLaw::Kind::kDelta0, 0.0};
  WeightLaw expo{WeightLaw::Kind::kExponential, 1.0};
  WeightLaw unif{WeightLaw::Kind::kUniform01, 0.0};
  CHECK(stationary_weight_discrepancy(delta0, 0.7).value == 0.0);
  CHECK(stationary_weight_discrepancy(expo, 1.3).value == 0.0);
  CHECK(stationary_weight_discrepancy(unif, 0.5).value ==
        doctest::Approx(-0.065306597126334236).epsilon(1e-12));
  CHECK(stationary_weight_discrepancy(unif, 1.0).value ==
        doctest::Approx(-0.10363832351432696).epsilon(1e-12));
  CHECK(stationary_weight_discrepancy(unif, 2.0).value ==
        doctest::Approx(-0.13533528323661269).epsilon(1e-12));
  CHECK_THROWS_AS(stationary_weight_discrepancy(unif, 0.0), std::domain_error);
}

TEST_CASE("monte carlo discrepancy agrees with the closed forms") {
  const auto exp_draw = [](Rng& rng) { return rng.exponential(); };
  const Discrepancy mc_exp =
      stationary_weight_discrepancy_mc(exp_draw, 1.0, 200000, 915, kSerial);
  CHECK(std::abs(mc_exp.value) < 4.0 * mc_exp.std_error);

  const auto unif_draw = [](Rng& rng) { return rng.uniform(); };
  const Discrepancy mc_unif =
      stationary_weight_discrepancy_mc(unif_draw, 1.0, 200000, 916, kSerial);
  CHECK(std::abs(mc_unif.value - (-0.10363832351432696)) < 4.0 * mc_unif.std_error);
  CHECK(mc_unif.std_error > 0.0);
  CHECK(mc_unif.std_error < 1e-2);
}

TEST_CASE("time weight cdfs") {
  TimeWeight power{TimeWeight::Kind::kPower, 2.0};
  CHECK(power.cdf(-0.5) == 0.0);
  CHECK(power.cdf(0.0) == 0.0);
  CHECK(power.cdf(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(power.cdf(1.0) == 1.0);
  CHECK(power.cdf(2.0) == 1.0);
  TimeWeight late{TimeWeight::Kind::kUniformHalfOne, 0.0};
  CHECK(late.cdf(0.3) == 0.0);
  CHECK(late.cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(late.cdf(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(late.cdf(1.0) == 1.0);
}

TEST_CASE("power-weighted occupation still regresses to the diagonal") {
  TimeWeight weight{TimeWeight::Kind::kPower, 1.0};
  const SamplingIdentityResult res =
      power_weight_identity_check(weight, 20000, 4096, 10, 917, kSerial, 0.03);
  CHECK(res.verdict.passed);
  CHECK(res.verdict.name == "weighted-diagonal-regression");
  TimeWeight bad{TimeWeight::Kind::kPower, 0.0};
  CHECK_THROWS_AS(power_weight_identity_check(bad, 100, 64, 10, 918, kSerial, 0.03),
                  ConfigError);
}

TEST_CASE("endpoint surface rejects malformed grids") {
  CHECK_THROWS_AS(endpoint_surface_f(100, 64, {}, 10, 919, kSerial), ConfigError);
  CHECK_THROWS_AS(endpoint_surface_f(100, 64, {0.5, 0.2}, 10, 919, kSerial), ConfigError);
  CHECK_THROWS_AS(endpoint_surface_f(100, 64, {0.0, 0.5}, 10, 919, kSerial), ConfigError);
  CHECK_THROWS_AS(endpoint_surface_f(100, 64, {0.5, 1.2}, 10, 919, kSerial), ConfigError);
  CHECK_THROWS_AS(endpoint_surface_f(100, 64, {0.1, 0.5}, 3, 919, kSerial), ConfigError);
}

TEST_CASE("endpoint surface statistics behave on a moderate run") {
  const EndpointSurface res =
      endpoint_surface_f(30000, 1024, {0.02, 0.5, 1.0}, 10, 920, kSerial);
  REQUIRE(res.t_values.size() == 3);
  REQUIRE(res.f_hat.size() == 30);
  // f is a probability surface.
  for (double f : res.f_hat) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  // At t = 1 conditioning on the occupation bin pins the endpoint-sign rate
  // near the bin center, so the surface rises with the bin.
  std::uint64_t populated = 0;
  for (std::size_t b = 0; b < 10; ++b) populated += res.bin_count[b];
  CHECK(populated == 30000);
  CHECK(res.integral_verdict.passed);
  CHECK(res.endpoint_verdict.passed);
  CHECK(res.small_t_verdict.passed);
  CHECK(res.bump_verdict.passed);
}
