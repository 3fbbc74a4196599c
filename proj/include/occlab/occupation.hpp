#pragma once

// The projected occupation measure and its queries: cap masses on the sphere
// (chordal metric) and quadrant time fractions in the plane.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "occlab/path_engine.hpp"
#include "occlab/stats.hpp"

namespace occlab {

struct Cap {
  std::vector<double> center;  // unit vector
  double radius = 1.0;         // chordal, in (0, 2]
};

struct OccupationMeasure {
  int dim = 0;
  std::vector<double> directions;  // n_atoms * dim
  std::vector<double> weights;

  std::size_t n_atoms() const { return weights.size(); }
  const double* direction(std::size_t i) const {
    return directions.data() + i * static_cast<std::size_t>(dim);
  }
  double total_weight() const;
};

enum class QuadratureRule { kLeftEndpoint, kRightEndpoint };

// One atom per grid step with weight 1/n_steps. Left-endpoint atoms by
// default; the right-endpoint variant exists as a sensitivity check.
OccupationMeasure occupation_measure(const SpherePath& sphere_path,
                                     QuadratureRule rule = QuadratureRule::kLeftEndpoint);

double cap_mass(const OccupationMeasure& mu, const Cap& cap);

// Index 0..3 of the quadrant owning (x, y): Q1 = {x >= 0, y > 0} and clockwise
// from there with half-open boundaries; the origin counts as Q1.
inline int quadrant_of(double x, double y) {
  if (x >= 0.0 && y > 0.0) return 0;
  if (x > 0.0 && y <= 0.0) return 1;
  if (x <= 0.0 && y < 0.0) return 2;
  if (x < 0.0 && y >= 0.0) return 3;
  return 0;  // origin
}

// Time fractions spent in Q1..Q4 (left-endpoint rule); sums to 1.
std::array<double, 4> quadrant_occupations(const SamplePath& path);

// Empirical conditional P(hit | mass in bin) on equal-width mass bins.
BinnedCurve conditional_given_cap_mass(const std::vector<std::pair<double, double>>& mass_and_hit,
                                       std::size_t n_bins);

}  // namespace occlab
