#pragma once

// Discrete-time simulation of the processes under study: Brownian motion in
// R^d, the perturbed (reflected-and-scaled) one-dimensional variant, skew
// products with piecewise-constant angles, strictly stable Levy processes,
// and the zero-set excursion counter.

#include <cstdint>
#include <vector>

#include "occlab/rng.hpp"

namespace occlab {

struct TimeGrid {
  double horizon = 1.0;
  std::uint32_t n_steps = 0;

  double dt() const { return horizon / static_cast<double>(n_steps); }
  double time(std::uint32_t k) const {
    return horizon * static_cast<double>(k) / static_cast<double>(n_steps);
  }
  std::uint32_t n_points() const { return n_steps + 1; }

  void validate() const;
};

struct SamplePath {
  TimeGrid grid;
  int dim = 1;
  std::vector<double> points;  // (n_steps + 1) * dim, row per grid point

  const double* point(std::uint32_t k) const {
    return points.data() + static_cast<std::size_t>(k) * dim;
  }
  double coord(std::uint32_t k, int i) const {
    return points[static_cast<std::size_t>(k) * dim + i];
  }
};

struct SpherePath {
  TimeGrid grid;
  int dim = 1;
  std::vector<double> directions;       // (n_steps + 1) * dim unit vectors
  std::vector<double> zero_convention;  // direction reported while the path is at 0

  const double* direction(std::uint32_t k) const {
    return directions.data() + static_cast<std::size_t>(k) * dim;
  }
};

// Angle-valued processes that are constant between zero-set times. The raw
// angles array stores 0 at masked grid points; angle_at resolves a masked
// point to the angle of the run it belongs to, so the value at t = 1 is
// always usable.
struct AngleProcess {
  TimeGrid grid;
  std::vector<double> angles;
  std::vector<std::uint8_t> zero_set_mask;
  std::vector<std::uint32_t> run_of;   // per grid point, index into run_angles
  std::vector<double> run_angles;

  double angle_at(std::uint32_t k) const { return run_angles[run_of[k]]; }
};

// A law on [0, 2*pi): either finitely many atoms or uniform.
class AngleLaw {
 public:
  static AngleLaw uniform();
  static AngleLaw discrete(std::vector<double> angles, std::vector<double> probs);

  double sample(Rng& rng) const;
  bool is_discrete() const { return !atoms_.empty(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }
  // Probability of each atom; for discrete laws only.
  double prob_of(double angle) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> probs_;  // empty means uniform
};

// Streaming Brownian stepper; simulate_bm and the experiment kernels share it
// so they consume the random stream identically.
class BrownianWalker {
 public:
  BrownianWalker(int dim, const TimeGrid& grid, Rng& rng);

  // Advances by one grid step; `pos` has `dim` entries updated in place.
  void step(double* pos) {
    for (int i = 0; i < dim_; ++i) pos[i] += sqrt_dt_ * rng_->gaussian();
  }

 private:
  int dim_;
  double sqrt_dt_;
  Rng* rng_;
};

SamplePath simulate_bm(int dim, const TimeGrid& grid, Rng& rng);

// Radial projection onto the unit sphere; the path's time at the origin
// (t = 0, and nowhere else almost surely) reports zero_convention.
SpherePath spherical_project(const SamplePath& path, std::vector<double> zero_convention);

// Default zero convention: first standard basis vector.
std::vector<double> default_zero_convention(int dim);

// One-dimensional process Y = (1 - mu) * M - B where M is the running maximum
// of the Brownian path B. For mu = 1 this is -B; general mu tilts the time
// spent below zero toward beta(1/2, 1/(2*mu)).
SamplePath simulate_perturbed_bm(double mu, const TimeGrid& grid, Rng& rng);

// Skew-product angles driven by the sign runs of a one-dimensional Brownian
// path: each maximal run of constant sign carries one i.i.d. draw from
// angle_law, and grid points at sign changes (and t = 0) are masked.
AngleProcess simulate_walsh_angles(const TimeGrid& grid, const AngleLaw& angle_law, Rng& rng);

// Strictly stable Levy path in the S1 parameterization (Chambers-Mallows-Stuck
// increments). alpha in (0, 2], |beta_skew| <= 1; alpha = 1 requires
// beta_skew = 0 because the skewed case is not strictly stable in this
// parameterization. alpha = 2 reduces to Brownian motion with variance 2t.
SamplePath simulate_stable_levy(double alpha, double beta_skew, const TimeGrid& grid, Rng& rng);

// P(Y_t > 0) for the strictly stable law above; free of t.
double stable_positivity(double alpha, double beta_skew);

// Angles painted on [0,1] by a stick-breaking partition with beta(1, theta)
// fractions, laid right to left from t = 1 so the interval containing any
// fixed time has the exchangeable structure of the theta-GEM partition. The
// dust near 0 (remaining length below one grid cell) is masked.
AngleProcess simulate_dirichlet_angle_process(double theta, const AngleLaw& angle_law,
                                              const TimeGrid& grid, Rng& rng);

// N_t: one more than the number of connected components of [0, t] \ Z whose
// length strictly exceeds t - G_t, where G_t is the last point of Z before t.
// zero_set must be sorted, within [0, 1], and contain 0.
int excursion_count(const std::vector<double>& zero_set, double t);

}  // namespace occlab
