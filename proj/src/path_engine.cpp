#include "occlab/path_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace occlab {

void TimeGrid::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  if (n_steps == 0) throw std::invalid_argument("TimeGrid: n_steps must be positive");
}

AngleLaw AngleLaw::uniform() { return AngleLaw{}; }

AngleLaw AngleLaw::discrete(std::vector<double> angles, std::vector<double> probs) {
  if (angles.empty() || angles.size() != probs.size()) {
    throw std::invalid_argument("AngleLaw: atoms and probabilities must match and be nonempty");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw std::invalid_argument("AngleLaw: probabilities must be positive");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw std::invalid_argument("AngleLaw: probabilities must sum to 1");
  for (double a : angles) {
    if (a < 0.0 || a >= 2.0 * std::numbers::pi) {
      throw std::invalid_argument("AngleLaw: atoms must lie in [0, 2*pi)");
    }
  }
  AngleLaw law;
  law.atoms_ = std::move(angles);
  law.probs_ = std::move(probs);
  return law;
}

double AngleLaw::sample(Rng& rng) const {
  if (atoms_.empty()) return 2.0 * std::numbers::pi * rng.uniform();
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return atoms_[i];
  }
  return atoms_.back();
}

double AngleLaw::prob_of(double angle) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] == angle) return probs_[i];
  }
  return 0.0;
}

BrownianWalker::BrownianWalker(int dim, const TimeGrid& grid, Rng& rng)
    : dim_(dim), sqrt_dt_(std::sqrt(grid.dt())), rng_(&rng) {
  grid.validate();
  if (dim < 1) throw std::invalid_argument("BrownianWalker: dim must be >= 1");
}

SamplePath simulate_bm(int dim, const TimeGrid& grid, Rng& rng) {
  BrownianWalker walker(dim, grid, rng);
  SamplePath path;
  path.grid = grid;
  path.dim = dim;
  path.points.assign(static_cast<std::size_t>(grid.n_points()) * dim, 0.0);
  for (std::uint32_t k = 1; k <= grid.n_steps; ++k) {
    double* cur = path.points.data() + static_cast<std::size_t>(k) * dim;
    const double* prev = cur - dim;
    std::copy(prev, prev + dim, cur);
    walker.step(cur);
  }
  return path;
}

std::vector<double> default_zero_convention(int dim) {
  std::vector<double> e(dim, 0.0);
  e[0] = 1.0;
  return e;
}

SpherePath spherical_project(const SamplePath& path, std::vector<double> zero_convention) {
  if (static_cast<int>(zero_convention.size()) != path.dim) {
    throw std::invalid_argument("spherical_project: zero_convention dimension mismatch");
  }
  double zc_norm = 0.0;
  for (double x : zero_convention) zc_norm += x * x;
  if (std::fabs(zc_norm - 1.0) > 1e-9) {
    throw std::invalid_argument("spherical_project: zero_convention must be a unit vector");
  }
  SpherePath sp;
  sp.grid = path.grid;
  sp.dim = path.dim;
  sp.zero_convention = zero_convention;
  sp.directions.resize(path.points.size());
  const int d = path.dim;
  for (std::uint32_t k = 0; k < path.grid.n_points(); ++k) {
    const double* p = path.point(k);
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) n2 += p[i] * p[i];
    double* out = sp.directions.data() + static_cast<std::size_t>(k) * d;
    if (n2 == 0.0) {
      std::copy(zero_convention.begin(), zero_convention.end(), out);
    } else {
      const double inv = 1.0 / std::sqrt(n2);
      for (int i = 0; i < d; ++i) out[i] = p[i] * inv;
    }
  }
  return sp;
}

SamplePath simulate_perturbed_bm(double mu, const TimeGrid& grid, Rng& rng) {
  grid.validate();
  if (!(mu > 0.0)) throw std::invalid_argument("simulate_perturbed_bm: mu must be positive");
  SamplePath path;
  path.grid = grid;
  path.dim = 1;
  path.points.assign(grid.n_points(), 0.0);
  const double sqrt_dt = std::sqrt(grid.dt());
  double b = 0.0;
  double m = 0.0;
  for (std::uint32_t k = 1; k <= grid.n_steps; ++k) {
    b += sqrt_dt * rng.gaussian();
    m = std::max(m, b);
    path.points[k] = (1.0 - mu) * m - b;
  }
  return path;
}

AngleProcess simulate_walsh_angles(const TimeGrid& grid, const AngleLaw& angle_law, Rng& rng) {
  grid.validate();
  const std::uint32_t n = grid.n_steps;
  const double sqrt_dt = std::sqrt(grid.dt());

  AngleProcess proc;
  proc.grid = grid;
  proc.angles.assign(grid.n_points(), 0.0);
  proc.zero_set_mask.assign(grid.n_points(), 0);
  proc.run_of.assign(grid.n_points(), 0);

  // First pass: the driving path's signs decide run boundaries. A grid point
  // is masked when the path sits exactly at zero or the sign just flipped.
  std::vector<std::int8_t> sign(grid.n_points(), 0);
  double b = 0.0;
  sign[0] = 0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    b += sqrt_dt * rng.gaussian();
    sign[k] = b > 0.0 ? 1 : (b < 0.0 ? -1 : 0);
  }

  // A run starts wherever the sign differs from the previous nonzero sign;
  // its first grid point is adjacent to the crossing and gets masked, as do
  // exact zeros.
  std::int8_t prev = 0;
  std::uint32_t current_run = 0;
  bool any_run = false;
  for (std::uint32_t k = 0; k <= n; ++k) {
    if (sign[k] == 0) {
      proc.zero_set_mask[k] = 1;
    } else if (sign[k] != prev) {
      if (any_run) ++current_run;
      any_run = true;
      proc.run_angles.push_back(angle_law.sample(rng));
      proc.zero_set_mask[k] = 1;
      prev = sign[k];
    }
    proc.run_of[k] = any_run ? current_run : 0;
  }
  if (!any_run) {
    // Degenerate path that never leaves zero; give it a single run.
    proc.run_angles.push_back(angle_law.sample(rng));
  }
  for (std::uint32_t k = 0; k <= n; ++k) {
    proc.angles[k] = proc.zero_set_mask[k] ? 0.0 : proc.run_angles[proc.run_of[k]];
  }
  return proc;
}

namespace {

// Chambers-Mallows-Stuck draw from the standard strictly stable law in the S1
// parameterization. For alpha = 2 this reduces to 2*sin(U)*sqrt(W), a normal
// with variance 2.
double stable_draw(double alpha, double beta_skew, Rng& rng) {
  const double u = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(u);  // beta_skew = 0 enforced upstream
  const double t = beta_skew * std::tan(0.5 * std::numbers::pi * alpha);
  const double b0 = std::atan(t) / alpha;
  const double s0 = std::pow(1.0 + t * t, 0.5 / alpha);
  const double a_u_b = alpha * (u + b0);
  return s0 * std::sin(a_u_b) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos(u - a_u_b) / w, (1.0 - alpha) / alpha);
}

void validate_stable(double alpha, double beta_skew) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw std::invalid_argument("stable: alpha must lie in (0, 2]");
  }
  if (beta_skew < -1.0 || beta_skew > 1.0) {
    throw std::invalid_argument("stable: beta_skew must lie in [-1, 1]");
  }
  if (alpha == 1.0 && beta_skew != 0.0) {
    throw std::invalid_argument(
        "stable: alpha = 1 with nonzero skew is not strictly stable in this parameterization");
  }
}

}  // namespace

SamplePath simulate_stable_levy(double alpha, double beta_skew, const TimeGrid& grid, Rng& rng) {
  grid.validate();
  validate_stable(alpha, beta_skew);
  SamplePath path;
  path.grid = grid;
  path.dim = 1;
  path.points.assign(grid.n_points(), 0.0);
  const double scale = std::pow(grid.dt(), 1.0 / alpha);
  double y = 0.0;
  if (alpha == 2.0) {
    // Gaussian increments; the CMS draw at alpha = 2 is N(0, 2) up to scale.
    const double g = scale * std::numbers::sqrt2;
    for (std::uint32_t k = 1; k <= grid.n_steps; ++k) {
      y += g * rng.gaussian();
      path.points[k] = y;
    }
    return path;
  }
  for (std::uint32_t k = 1; k <= grid.n_steps; ++k) {
    y += scale * stable_draw(alpha, beta_skew, rng);
    path.points[k] = y;
  }
  return path;
}

double stable_positivity(double alpha, double beta_skew) {
  validate_stable(alpha, beta_skew);
  if (alpha == 1.0) return 0.5;
  const double t = beta_skew * std::tan(0.5 * std::numbers::pi * alpha);
  return 0.5 + std::atan(t) / (std::numbers::pi * alpha);
}

AngleProcess simulate_dirichlet_angle_process(double theta, const AngleLaw& angle_law,
                                              const TimeGrid& grid, Rng& rng) {
  grid.validate();
  if (!(theta > 0.0)) throw std::invalid_argument("dirichlet angles: theta must be positive");
  if (grid.horizon != 1.0) {
    throw std::invalid_argument("dirichlet angles: defined on horizon 1");
  }

  // Break [0,1] from the right: each stick takes a beta(1, theta) fraction of
  // what remains, i.e. the image of a rate-theta Poisson process under
  // x -> e^{-x}. Stop once the remainder is below one grid cell.
  struct Piece {
    double lo;
    double angle;
  };
  std::vector<Piece> pieces;
  double hi = 1.0;
  const double dt = grid.dt();
  while (hi >= dt) {
    const double frac = 1.0 - std::pow(rng.uniform_open(), 1.0 / theta);  // beta(1, theta)
    const double lo = hi * (1.0 - frac);
    pieces.push_back(Piece{lo, angle_law.sample(rng)});
    hi = lo;
  }

  AngleProcess proc;
  proc.grid = grid;
  proc.angles.assign(grid.n_points(), 0.0);
  proc.zero_set_mask.assign(grid.n_points(), 0);
  proc.run_of.assign(grid.n_points(), 0);
  proc.run_angles.reserve(pieces.size());
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    proc.run_angles.push_back(it->angle);
  }
  if (proc.run_angles.empty()) proc.run_angles.push_back(angle_law.sample(rng));

  // pieces[i] covers [pieces[i].lo, previous lo); runs are indexed from the
  // left, so piece i maps to run (pieces.size() - 1 - i).
  for (std::uint32_t k = 0; k <= grid.n_steps; ++k) {
    const double t = grid.time(k);
    std::size_t run = 0;
    bool in_dust = true;
    if (!pieces.empty() && t >= pieces.back().lo) {
      // Binary search for the piece whose [lo, hi) contains t.
      std::size_t a = 0, b = pieces.size() - 1;
      while (a < b) {
        const std::size_t mid = (a + b) / 2;
        if (t >= pieces[mid].lo) {
          b = mid;
        } else {
          a = mid + 1;
        }
      }
      run = pieces.size() - 1 - a;
      in_dust = false;
    }
    proc.run_of[k] = static_cast<std::uint32_t>(run);
    if (in_dust) proc.zero_set_mask[k] = 1;
  }
  proc.zero_set_mask[0] = 1;
  // Stick boundaries play the role of zero-set times: the first grid point of
  // each run is adjacent to one and gets masked.
  for (std::uint32_t k = 1; k <= grid.n_steps; ++k) {
    if (proc.run_of[k] != proc.run_of[k - 1]) proc.zero_set_mask[k] = 1;
  }
  for (std::uint32_t k = 0; k <= grid.n_steps; ++k) {
    proc.angles[k] = proc.zero_set_mask[k] ? 0.0 : proc.run_angles[proc.run_of[k]];
  }
  return proc;
}

int excursion_count(const std::vector<double>& zero_set, double t) {
  if (!(t > 0.0) || t > 1.0) throw std::invalid_argument("excursion_count: t must lie in (0, 1]");
  if (zero_set.empty() || zero_set.front() != 0.0) {
    throw std::invalid_argument("excursion_count: zero set must start at 0");
  }
  if (!std::is_sorted(zero_set.begin(), zero_set.end())) {
    throw std::invalid_argument("excursion_count: zero set must be sorted");
  }
  if (zero_set.back() > 1.0) {
    throw std::invalid_argument("excursion_count: zero set must lie in [0, 1]");
  }
  double last_before_t = 0.0;
  for (double z : zero_set) {
    if (z < t) last_before_t = std::max(last_before_t, z);
  }
  const double cutoff = t - last_before_t;
  int big_gaps = 0;
  double prev = 0.0;
  for (double z : zero_set) {
    if (z > t) break;
    if (z - prev > cutoff) ++big_gaps;
    prev = z;
  }
  return 1 + big_gaps;
}

}  // namespace occlab
