#pragma once

// Nested cover hierarchies.
//
// On the unit sphere: GRID_j is 2^{-j-1}-separated and covers the sphere at
// scale close to 2^{-j-1} (exactly that in d = 2; within the candidate-set
// fill radius otherwise), with GRID_j a prefix of GRID_{j+1}. Caps C_j are the
// balls of radius 2^{-j} centered at GRID_j.
//
// In ambient space: GridCoverR describes dyadic lattices a_j Z^d with
// a_j = 2^{-j} / sqrt(d), which are exactly nested, 2^{-j-1}-covering, and
// (for d <= 4) at least 2^{-j-1}-separated. Lattice points are enumerated on
// demand rather than materialized.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace occlab {

struct CoverHierarchy {
  int dim = 0;
  int j_max = 0;
  std::vector<std::vector<double>> levels;  // levels[j-1]: flat points of GRID_j
  double candidate_fill = 0.0;              // density slack of the candidate set

  double cap_radius(int j) const { return std::ldexp(1.0, -j); }
  double separation(int j) const { return std::ldexp(1.0, -(j + 1)); }
  std::size_t n_points(int j) const { return levels[j - 1].size() / dim; }
  const double* point(int j, std::size_t i) const {
    return levels[j - 1].data() + i * static_cast<std::size_t>(dim);
  }
};

// Builds the sphere hierarchy for levels 1..j_max. Throws ConfigError for
// dim < 2 and ResourceError when the finest level would be unreasonably big.
CoverHierarchy build_cover(int dim, int j_max);

// Deterministic, nearly uniform candidate set on S^{d-1} (flat storage).
std::vector<double> sphere_candidates(int dim, std::size_t n);

struct LatticeCoord {
  std::array<std::int32_t, 4> c{0, 0, 0, 0};
  bool operator==(const LatticeCoord&) const = default;
};

struct LatticeCoordHash {
  std::size_t operator()(const LatticeCoord& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int32_t v : k.c) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct GridCoverR {
  int dim = 3;
  double radius_R = 2.0;
  int j_max = 6;

  void validate() const;

  double spacing(int j) const { return std::ldexp(1.0, -j) / std::sqrt(static_cast<double>(dim)); }
  double ball_radius(int j) const { return std::ldexp(1.0, -j); }

  // Lattice point position for integer coords at level j.
  void position(int j, const LatticeCoord& k, double* out) const {
    const double a = spacing(j);
    for (int i = 0; i < dim; ++i) out[i] = a * static_cast<double>(k.c[i]);
  }

  // Grid membership: lattice points are kept within |x| <= radius_R + 0.5 so
  // every level uses the same shell and nesting stays exact.
  bool in_shell(int j, const LatticeCoord& k) const {
    const double a = spacing(j);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double x = a * static_cast<double>(k.c[i]);
      s += x * x;
    }
    const double lim = radius_R + 0.5;
    return s <= lim * lim;
  }

  // Coords of the level j-1 lattice point nearest to a level-j point.
  static LatticeCoord parent(const LatticeCoord& k) {
    LatticeCoord p;
    for (int i = 0; i < 4; ++i) p.c[i] = (k.c[i] + 1) >> 1;
    return p;
  }

  // Calls f(coord) for each level-j lattice point within `radius` of q.
  template <class F>
  void for_lattice_near(int j, const double* q, double radius, F&& f) const {
    const double a = spacing(j);
    std::int64_t lo[4], hi[4];
    for (int i = 0; i < dim; ++i) {
      lo[i] = static_cast<std::int64_t>(std::ceil((q[i] - radius) / a));
      hi[i] = static_cast<std::int64_t>(std::floor((q[i] + radius) / a));
    }
    const double r2 = radius * radius;
    LatticeCoord k;
    std::int64_t c[4];
    for (int i = 0; i < dim; ++i) c[i] = lo[i];
    if (dim == 0) return;
    for (;;) {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double d = a * static_cast<double>(c[i]) - q[i];
        d2 += d * d;
      }
      if (d2 <= r2) {
        for (int i = 0; i < dim; ++i) k.c[i] = static_cast<std::int32_t>(c[i]);
        if (in_shell(j, k)) f(k);
      }
      int i = 0;
      while (i < dim && ++c[i] > hi[i]) {
        c[i] = lo[i];
        ++i;
      }
      if (i == dim) break;
    }
  }
};

}  // namespace occlab
