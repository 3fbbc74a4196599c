#pragma once

// Small geometric helpers over flat runtime-dimension point storage, plus a
// uniform-cell spatial hash for neighbor queries.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace occlab {

inline double dot(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const double* a, int dim) { return dot(a, a, dim); }

inline double norm(const double* a, int dim) { return std::sqrt(norm2(a, dim)); }

inline double dist2(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const double* a, const double* b, int dim) {
  return std::sqrt(dist2(a, b, dim));
}

// Uniform-grid hash over a fixed point set. Query cost is proportional to the
// number of cells intersecting the query ball, so pick the cell size near the
// typical query radius.
class SpatialHash {
 public:
  SpatialHash(const std::vector<double>& points, int dim, double cell)
      : points_(&points), dim_(dim), cell_(cell) {
    if (dim < 1 || cell <= 0.0) throw std::invalid_argument("SpatialHash: bad parameters");
    const std::size_t n = points.size() / static_cast<std::size_t>(dim);
    cells_.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      cells_[key_of(&points[i * static_cast<std::size_t>(dim)])].push_back(
          static_cast<std::uint32_t>(i));
    }
  }

  // Calls f(index) for every stored point within `radius` of q, in
  // deterministic order (cell scan order, then insertion order).
  template <class F>
  void for_neighbors(const double* q, double radius, F&& f) const {
    std::int64_t lo[8], hi[8];
    if (dim_ > 8) throw std::invalid_argument("SpatialHash: dimension too large");
    for (int i = 0; i < dim_; ++i) {
      lo[i] = cell_index(q[i] - radius);
      hi[i] = cell_index(q[i] + radius);
    }
    const double r2 = radius * radius;
    std::int64_t c[8];
    for (int i = 0; i < dim_; ++i) c[i] = lo[i];
    for (;;) {
      auto it = cells_.find(mix_key(c));
      if (it != cells_.end()) {
        for (std::uint32_t idx : it->second) {
          const double* p = &(*points_)[static_cast<std::size_t>(idx) * dim_];
          if (dist2(p, q, dim_) <= r2) f(idx);
        }
      }
      int i = 0;
      while (i < dim_ && ++c[i] > hi[i]) {
        c[i] = lo[i];
        ++i;
      }
      if (i == dim_) break;
    }
  }

  // Index of the nearest stored point, or -1 if the set is empty. Expanding
  // ring search; exact.
  std::int64_t nearest(const double* q) const {
    if (points_->empty()) return -1;
    double radius = cell_;
    for (;;) {
      std::int64_t best = -1;
      double best_d2 = radius * radius;
      for_neighbors(q, radius, [&](std::uint32_t idx) {
        const double* p = &(*points_)[static_cast<std::size_t>(idx) * dim_];
        const double d2 = dist2(p, q, dim_);
        if (d2 < best_d2 || (d2 == best_d2 && (best < 0 || idx < best))) {
          best_d2 = d2;
          best = idx;
        }
      });
      if (best >= 0) return best;
      radius *= 2.0;
      if (radius > 1e12) return -1;
    }
  }

 private:
  std::int64_t cell_index(double x) const {
    return static_cast<std::int64_t>(std::floor(x / cell_));
  }

  std::uint64_t key_of(const double* p) const {
    std::int64_t c[8];
    for (int i = 0; i < dim_; ++i) c[i] = cell_index(p[i]);
    return mix_key(c);
  }

  std::uint64_t mix_key(const std::int64_t* c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < dim_; ++i) {
      std::uint64_t v = static_cast<std::uint64_t>(c[i]);
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffULL;
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  }

  const std::vector<double>* points_;
  int dim_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace occlab
