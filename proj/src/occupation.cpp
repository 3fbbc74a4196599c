#include "occlab/occupation.hpp"

#include <stdexcept>

#include "occlab/geom.hpp"

namespace occlab {

double OccupationMeasure::total_weight() const {
  KahanSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

OccupationMeasure occupation_measure(const SpherePath& sphere_path, QuadratureRule rule) {
  const std::uint32_t n = sphere_path.grid.n_steps;
  if (sphere_path.directions.empty()) {
    throw std::invalid_argument("occupation_measure: empty sphere path");
  }
  OccupationMeasure mu;
  mu.dim = sphere_path.dim;
  mu.weights.assign(n, 1.0 / static_cast<double>(n));
  const std::uint32_t first = rule == QuadratureRule::kLeftEndpoint ? 0 : 1;
  mu.directions.assign(sphere_path.directions.begin() + first * sphere_path.dim,
                       sphere_path.directions.begin() + (first + n) * sphere_path.dim);
  return mu;
}

double cap_mass(const OccupationMeasure& mu, const Cap& cap) {
  if (static_cast<int>(cap.center.size()) != mu.dim) {
    throw std::invalid_argument("cap_mass: dimension mismatch");
  }
  const double r2 = cap.radius * cap.radius;
  KahanSum s;
  for (std::size_t i = 0; i < mu.n_atoms(); ++i) {
    if (dist2(mu.direction(i), cap.center.data(), mu.dim) <= r2) s.add(mu.weights[i]);
  }
  return s.value();
}

std::array<double, 4> quadrant_occupations(const SamplePath& path) {
  if (path.dim != 2) throw std::invalid_argument("quadrant_occupations: path must be planar");
  std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
  const std::uint32_t n = path.grid.n_steps;
  for (std::uint32_t k = 0; k < n; ++k) {
    const double* p = path.point(k);
    counts[quadrant_of(p[0], p[1])] += 1;
  }
  std::array<double, 4> out;
  for (int q = 0; q < 4; ++q) out[q] = static_cast<double>(counts[q]) / static_cast<double>(n);
  return out;
}

BinnedCurve conditional_given_cap_mass(const std::vector<std::pair<double, double>>& mass_and_hit,
                                       std::size_t n_bins) {
  if (mass_and_hit.empty()) throw std::invalid_argument("conditional_given_cap_mass: empty input");
  BinnedCurve curve(n_bins);
  for (const auto& [mass, hit] : mass_and_hit) curve.add(mass, hit);
  return curve;
}

}  // namespace occlab
