#include "occlab/cover.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "occlab/errors.hpp"
#include "occlab/geom.hpp"
#include "occlab/rng.hpp"

namespace occlab {

std::vector<double> sphere_candidates(int dim, std::size_t n) {
  std::vector<double> pts;
  pts.reserve(n * static_cast<std::size_t>(dim));
  if (dim == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      pts.push_back(std::cos(a));
      pts.push_back(std::sin(a));
    }
    return pts;
  }
  if (dim == 3) {
    // Fibonacci spiral: close to the best uniform fill one gets for free.
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = ga * static_cast<double>(i);
      pts.push_back(r * std::cos(phi));
      pts.push_back(r * std::sin(phi));
      pts.push_back(z);
    }
    return pts;
  }
  // Higher dimensions: deterministic Gaussian directions.
  Rng rng(0x5ca1ab1eULL, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double v[16];
    double s = 0.0;
    do {
      s = 0.0;
      for (int k = 0; k < dim; ++k) {
        v[k] = rng.gaussian();
        s += v[k] * v[k];
      }
    } while (s == 0.0);
    const double inv = 1.0 / std::sqrt(s);
    for (int k = 0; k < dim; ++k) pts.push_back(v[k] * inv);
  }
  return pts;
}

namespace {

// Dyadic angle sets: level j uses 2^(j+3) equally spaced angles, so levels
// nest exactly and both the separation and the covering scale sit inside
// (2^{-j-2}, 2^{-j}).
CoverHierarchy build_circle_cover(int j_max) {
  CoverHierarchy cover;
  cover.dim = 2;
  cover.j_max = j_max;
  cover.candidate_fill = 0.0;
  cover.levels.resize(j_max);
  std::vector<double> pts;
  for (int j = 1; j <= j_max; ++j) {
    const std::uint64_t m = 1ULL << (j + 3);
    if (j == 1) {
      for (std::uint64_t k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        pts.push_back(std::cos(a));
        pts.push_back(std::sin(a));
      }
    } else {
      // Odd multiples refine the previous level in place.
      for (std::uint64_t k = 1; k < m; k += 2) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        pts.push_back(std::cos(a));
        pts.push_back(std::sin(a));
      }
    }
    cover.levels[j - 1] = pts;
  }
  return cover;
}

// Incremental hash used while packing: accepted points are inserted as they
// are chosen.
class GrowingHash {
 public:
  GrowingHash(int dim, double cell) : dim_(dim), cell_(cell) {}

  void insert(const std::vector<double>& store, std::size_t idx) {
    cells_[key(&store[idx * dim_])].push_back(idx);
  }

  bool any_within(const std::vector<double>& store, const double* q, double r) const {
    std::int64_t lo[8], hi[8], c[8];
    for (int i = 0; i < dim_; ++i) {
      lo[i] = static_cast<std::int64_t>(std::floor((q[i] - r) / cell_));
      hi[i] = static_cast<std::int64_t>(std::floor((q[i] + r) / cell_));
      c[i] = lo[i];
    }
    const double r2 = r * r;
    for (;;) {
      auto it = cells_.find(mix(c));
      if (it != cells_.end()) {
        for (std::size_t idx : it->second) {
          if (dist2(&store[idx * dim_], q, dim_) < r2) return true;
        }
      }
      int i = 0;
      while (i < dim_ && ++c[i] > hi[i]) {
        c[i] = lo[i];
        ++i;
      }
      if (i == dim_) break;
    }
    return false;
  }

 private:
  std::uint64_t key(const double* p) const {
    std::int64_t c[8];
    for (int i = 0; i < dim_; ++i) c[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
    return mix(c);
  }
  std::uint64_t mix(const std::int64_t* c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < dim_; ++i) {
      h ^= static_cast<std::uint64_t>(c[i]) * 0x9e3779b97f4a7c15ULL;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  int dim_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

CoverHierarchy build_cover(int dim, int j_max) {
  if (dim < 2) throw ConfigError("build_cover: dim must be >= 2");
  if (j_max < 1 || j_max > 12) throw ConfigError("build_cover: j_max must lie in [1, 12]");
  if (dim == 2) return build_circle_cover(j_max);

  // Rough count of the finest level; refuse sizes that would not fit the
  // packing pass comfortably in memory.
  const double sep = std::ldexp(1.0, -(j_max + 1));
  const double est = 16.0 * std::pow(1.0 / sep, dim - 1);
  if (est > 4e6) {
    throw ResourceError("build_cover: finest level needs ~" + std::to_string(est) +
                        " points; limit 4e6. Lower j_max or dim.");
  }

  std::size_t n_candidates = static_cast<std::size_t>(std::min(2.5e6, 24.0 * est));
  n_candidates = std::max<std::size_t>(n_candidates, 4096);
  const std::vector<double> cand = sphere_candidates(dim, n_candidates);

  CoverHierarchy cover;
  cover.dim = dim;
  cover.j_max = j_max;
  // Fill radius of the candidate sets, by construction ~ c / n^{1/(d-1)}.
  cover.candidate_fill =
      dim == 3 ? 2.7 / std::sqrt(static_cast<double>(n_candidates))
               : 4.0 * std::pow(static_cast<double>(n_candidates), -1.0 / (dim - 1));
  cover.levels.resize(j_max);

  // Greedy maximal packing per level, seeded with the previous level so the
  // hierarchy nests exactly and each level is a prefix of the next.
  std::vector<double> accepted;
  for (int j = 1; j <= j_max; ++j) {
    const double tau = cover.separation(j);
    GrowingHash hash(dim, tau);
    for (std::size_t i = 0; i < accepted.size() / dim; ++i) hash.insert(accepted, i);
    const std::size_t n_cand = cand.size() / dim;
    for (std::size_t i = 0; i < n_cand; ++i) {
      const double* p = &cand[i * static_cast<std::size_t>(dim)];
      if (hash.any_within(accepted, p, tau)) continue;
      const std::size_t idx = accepted.size() / dim;
      accepted.insert(accepted.end(), p, p + dim);
      hash.insert(accepted, idx);
    }
    cover.levels[j - 1] = accepted;
  }
  return cover;
}

void GridCoverR::validate() const {
  if (dim < 1 || dim > 4) {
    throw ConfigError("GridCoverR: dim must lie in [1, 4] (separation needs spacing >= 2^{-j-1})");
  }
  if (!(radius_R > 0.0)) throw ConfigError("GridCoverR: radius must be positive");
  if (j_max < 1 || j_max > 24) throw ConfigError("GridCoverR: j_max must lie in [1, 24]");
}

}  // namespace occlab
