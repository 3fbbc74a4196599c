#include "occlab/geom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "occlab/rng.hpp"
#include "doctest.h"

using namespace occlab;

TEST_CASE("vector helpers on hand values") {
  const double a[3] = {1.0, 2.0, 3.0};
  const double b[3] = {4.0, -5.0, 6.0};
  CHECK(dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(norm2(a, 3) == doctest::Approx(14.0));
  CHECK(norm(a, 3) == doctest::Approx(std::sqrt(14.0)));
  CHECK(dist2(a, b, 3) == doctest::Approx(9.0 + 49.0 + 9.0));
  CHECK(dist(a, b, 3) == doctest::Approx(std::sqrt(67.0)));
}

namespace {

std::vector<double> random_points(int dim, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<double> pts(n * static_cast<std::size_t>(dim));
  for (double& x : pts) x = 4.0 * rng.uniform() - 2.0;
  return pts;
}

std::vector<std::uint32_t> brute_within(const std::vector<double>& pts, int dim,
                                        const double* q, double r) {
  std::vector<std::uint32_t> out;
  const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (dist2(&pts[i * dim], q, dim) <= r * r) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace

TEST_CASE("spatial hash neighbor queries agree with brute force") {
  for (int dim : {1, 2, 3}) {
    const std::vector<double> pts = random_points(dim, 600, 11 + dim);
    for (double cell : {0.08, 0.3, 1.1}) {
      const SpatialHash hash(pts, dim, cell);
      Rng rng(99 + dim, 0);
      for (int t = 0; t < 40; ++t) {
        double q[3];
        for (int i = 0; i < dim; ++i) q[i] = 4.4 * rng.uniform() - 2.2;
        const double r = 0.05 + 0.6 * rng.uniform();
        std::vector<std::uint32_t> got;
        hash.for_neighbors(q, r, [&](std::uint32_t idx) { got.push_back(idx); });
        std::sort(got.begin(), got.end());
        CHECK(got == brute_within(pts, dim, q, r));
      }
    }
  }
}

TEST_CASE("spatial hash nearest is exact even across cell boundaries") {
  for (int dim : {2, 3}) {
    const std::vector<double> pts = random_points(dim, 400, 31 + dim);
    const SpatialHash hash(pts, dim, 0.25);
    Rng rng(77 + dim, 0);
    for (int t = 0; t < 60; ++t) {
      double q[3];
      for (int i = 0; i < dim; ++i) q[i] = 5.0 * rng.uniform() - 2.5;
      const std::int64_t got = hash.nearest(q);
      std::int64_t want = -1;
      double best = 1e300;
      const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 = dist2(&pts[i * dim], q, dim);
        if (d2 < best) {
          best = d2;
          want = static_cast<std::int64_t>(i);
        }
      }
      REQUIRE(got >= 0);
      CHECK(dist2(&pts[static_cast<std::size_t>(got) * dim], q, dim) ==
            doctest::Approx(best).epsilon(1e-12));
      CHECK(got == want);
    }
  }
}

TEST_CASE("spatial hash on clustered points still answers correctly") {
  // Many duplicates in one cell plus a far outlier.
  std::vector<double> pts;
  for (int i = 0; i < 50; ++i) {
    pts.push_back(0.01 * i);
    pts.push_back(0.0);
  }
  pts.push_back(100.0);
  pts.push_back(100.0);
  const SpatialHash hash(pts, 2, 0.5);
  const double q[2] = {99.0, 99.0};
  CHECK(hash.nearest(q) == 50);
  const double origin[2] = {0.0, 0.0};
  CHECK(hash.nearest(origin) == 0);
  std::size_t count = 0;
  hash.for_neighbors(origin, 0.25, [&](std::uint32_t) { ++count; });
  CHECK(count == 26);  // points at 0.00 .. 0.25 inclusive
}
