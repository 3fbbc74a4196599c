#include "occlab/set_topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "occlab/errors.hpp"
#include "occlab/geom.hpp"

namespace occlab {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // Smaller index wins the root, so roots are the least member indices.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent[b] = a;
    } else {
      parent[a] = b;
    }
  }
};

double bbox_diagonal(const PointCloud& cloud) {
  if (cloud.n() == 0) return 0.0;
  std::vector<double> lo(cloud.dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(cloud.dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    const double* p = cloud.point(i);
    for (int d = 0; d < cloud.dim; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  double s = 0.0;
  for (int d = 0; d < cloud.dim; ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
  return std::sqrt(s);
}

double suggested_cell(const PointCloud& cloud) {
  const double diag = bbox_diagonal(cloud);
  if (diag <= 0.0) return 1.0;
  const double per_axis =
      std::pow(static_cast<double>(cloud.n()), 1.0 / static_cast<double>(cloud.dim));
  return std::max(diag / (per_axis + 1.0), diag * 1e-9);
}

// All directions with entries in {-1,0,1} (first nonzero entry +1), normalized.
// Directional extents under this set underestimate the true diameter by at
// most ~10% in d <= 4.
std::vector<double> extent_directions(int dim) {
  std::vector<double> dirs;
  std::vector<int> v(static_cast<std::size_t>(dim), -1);
  for (;;) {
    int first_nonzero = 0;
    bool all_zero = true;
    for (int i = 0; i < dim; ++i) {
      if (v[static_cast<std::size_t>(i)] != 0) {
        first_nonzero = v[static_cast<std::size_t>(i)];
        all_zero = false;
        break;
      }
    }
    if (!all_zero && first_nonzero > 0) {
      double n2 = 0.0;
      for (int x : v) n2 += static_cast<double>(x * x);
      const double inv = 1.0 / std::sqrt(n2);
      for (int x : v) dirs.push_back(static_cast<double>(x) * inv);
    }
    int i = 0;
    while (i < dim && ++v[static_cast<std::size_t>(i)] > 1) {
      v[static_cast<std::size_t>(i)] = -1;
      ++i;
    }
    if (i == dim) break;
  }
  return dirs;
}

double extent_diameter(const std::vector<double>& dirs, int dim, const double* pts,
                       const std::uint32_t* idx, std::size_t count, std::size_t stride_dim) {
  const std::size_t n_dirs = dirs.size() / static_cast<std::size_t>(dim);
  double best = 0.0;
  for (std::size_t d = 0; d < n_dirs; ++d) {
    const double* u = dirs.data() + d * static_cast<std::size_t>(dim);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < count; ++i) {
      const double* p = pts + static_cast<std::size_t>(idx[i]) * stride_dim;
      const double s = dot(p, u, dim);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

constexpr std::size_t kExactDiameterCap = 512;

// Diameter of a set of ball centers: exact pairwise max for small sets,
// directional extents above the cap.
double center_spread(const std::vector<double>& dirs, int dim, const double* centers,
                     const std::vector<std::uint32_t>& balls) {
  if (balls.size() <= 1) return 0.0;
  if (balls.size() <= kExactDiameterCap) {
    double best = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
      const double* a = centers + static_cast<std::size_t>(balls[i]) * dim;
      for (std::size_t k = i + 1; k < balls.size(); ++k) {
        const double* b = centers + static_cast<std::size_t>(balls[k]) * dim;
        best = std::max(best, dist2(a, b, dim));
      }
    }
    return std::sqrt(best);
  }
  return extent_diameter(dirs, dim, centers, balls.data(), balls.size(),
                         static_cast<std::size_t>(dim));
}

void require_unit_ball(const PointCloud& cloud, const char* where) {
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    if (norm2(cloud.point(i), cloud.dim) > 1.0 + 1e-9) {
      throw ConfigError(std::string(where) + ": cloud must be rescaled into the unit ball");
    }
  }
}

void require_cloud(const PointCloud& cloud, const char* where) {
  if (cloud.dim < 1 || cloud.dim > 4 || cloud.n() == 0) {
    throw ConfigError(std::string(where) + ": need a nonempty cloud of dimension 1..4");
  }
}

std::vector<std::uint32_t> model_components(const BallModel& model) {
  UnionFind uf(model.n_balls());
  for (std::uint32_t b = 0; b < model.n_balls(); ++b) {
    for (std::uint32_t e = model.adjacency_start[b]; e < model.adjacency_start[b + 1]; ++e) {
      uf.unite(b, model.adjacency[e]);
    }
  }
  std::vector<std::uint32_t> comp(model.n_balls());
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::uint32_t next = 0;
  for (std::uint32_t b = 0; b < model.n_balls(); ++b) {
    const std::uint32_t root = uf.find(b);
    auto [it, inserted] = remap.emplace(root, next);
    if (inserted) ++next;
    comp[b] = it->second;
  }
  return comp;
}

std::vector<std::vector<std::uint32_t>> group_by_component(
    const std::vector<std::uint32_t>& comp) {
  std::uint32_t n_comp = 0;
  for (std::uint32_t c : comp) n_comp = std::max(n_comp, c + 1);
  std::vector<std::vector<std::uint32_t>> groups(n_comp);
  for (std::uint32_t b = 0; b < comp.size(); ++b) groups[comp[b]].push_back(b);
  return groups;
}

int consistent_depth(const PointCloud& cloud, int j_max, const char* where) {
  if (j_max < 1 || j_max > 24) throw ConfigError(std::string(where) + ": j_max out of range");
  if (cloud.resolution <= 0.0) return j_max;
  int j_deep = 0;
  for (int j = 1; j <= j_max; ++j) {
    if (std::ldexp(1.0, -j) >= 4.0 * cloud.resolution) j_deep = j;
  }
  if (j_deep == 0) {
    throw UnreliableInputError(std::string(where) + ": resolution too coarse for any level");
  }
  return j_deep;
}

}  // namespace

PointCloud cloud_from_path(const SamplePath& path) {
  PointCloud cloud;
  cloud.dim = path.dim;
  cloud.points = path.points;
  double res = 0.0;
  const std::size_t n = cloud.n();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    res = std::max(res, dist(cloud.point(k), cloud.point(k + 1), cloud.dim));
  }
  cloud.resolution = res;
  return cloud;
}

double directional_diameter(const PointCloud& cloud) {
  if (cloud.n() == 0) return 0.0;
  const std::vector<double> dirs = extent_directions(cloud.dim);
  const std::size_t n_dirs = dirs.size() / static_cast<std::size_t>(cloud.dim);
  double best = 0.0;
  for (std::size_t d = 0; d < n_dirs; ++d) {
    const double* u = dirs.data() + d * static_cast<std::size_t>(cloud.dim);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < cloud.n(); ++i) {
      const double s = dot(cloud.point(i), u, cloud.dim);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.n() == 0 || b.n() == 0) throw std::domain_error("hausdorff_distance: empty cloud");
  if (a.dim != b.dim) throw std::domain_error("hausdorff_distance: dimension mismatch");
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    const SpatialHash hash(to.points, to.dim, suggested_cell(to));
    double worst = 0.0;
    for (std::size_t i = 0; i < from.n(); ++i) {
      const std::int64_t j = hash.nearest(from.point(i));
      worst = std::max(worst, dist(from.point(i), to.point(static_cast<std::size_t>(j)),
                                   from.dim));
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

PointCloud hausdorff_limsup(const std::vector<PointCloud>& sets, std::size_t tail_start,
                            double tol) {
  if (sets.size() <= tail_start) {
    throw std::domain_error("hausdorff_limsup: tail_start beyond the sequence");
  }
  if (tol < 0.0) throw std::domain_error("hausdorff_limsup: negative tolerance");
  const int dim = sets[tail_start].dim;
  PointCloud candidates;
  candidates.dim = dim;
  for (std::size_t s = tail_start; s < sets.size(); ++s) {
    if (sets[s].dim != dim) throw std::domain_error("hausdorff_limsup: dimension mismatch");
    candidates.points.insert(candidates.points.end(), sets[s].points.begin(),
                             sets[s].points.end());
  }
  PointCloud out;
  out.dim = dim;
  if (candidates.n() == 0) return out;

  std::vector<SpatialHash> hashes;
  hashes.reserve(sets.size() - tail_start);
  const double cell = std::max(tol, suggested_cell(candidates) * 1e-3);
  for (std::size_t s = tail_start; s < sets.size(); ++s) {
    hashes.emplace_back(sets[s].points, dim, cell);
  }
  for (std::size_t i = 0; i < candidates.n(); ++i) {
    const double* p = candidates.point(i);
    bool keep = true;
    for (std::size_t s = 0; s < hashes.size(); ++s) {
      if (sets[tail_start + s].n() == 0) {
        keep = false;
        break;
      }
      bool near = false;
      hashes[s].for_neighbors(p, tol, [&](std::uint32_t) { near = true; });
      if (!near) {
        keep = false;
        break;
      }
    }
    if (keep) out.push(p);
  }
  // Deduplicate exact copies so constant sequences return one copy of the set.
  const std::size_t d = static_cast<std::size_t>(dim);
  std::vector<std::size_t> order(out.n());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(
        out.points.begin() + x * d, out.points.begin() + (x + 1) * d,
        out.points.begin() + y * d, out.points.begin() + (y + 1) * d);
  });
  std::vector<double> dedup;
  dedup.reserve(out.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double* p = out.point(order[i]);
    if (i > 0) {
      const double* q = dedup.data() + dedup.size() - d;
      if (std::equal(p, p + d, q)) continue;
    }
    dedup.insert(dedup.end(), p, p + d);
  }
  out.points = std::move(dedup);
  return out;
}

BruteComponents brute_components(const PointCloud& cloud, double link_radius) {
  if (!(link_radius > 0.0)) throw std::domain_error("brute_components: link_radius must be > 0");
  BruteComponents out;
  const std::size_t n = cloud.n();
  out.label.assign(n, 0);
  if (n == 0) return out;
  const SpatialHash hash(cloud.points, cloud.dim, link_radius);
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    hash.for_neighbors(cloud.point(i), link_radius, [&](std::uint32_t idx) {
      if (idx > i) uf.unite(static_cast<std::uint32_t>(i), idx);
    });
  }
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
    auto [it, inserted] = remap.emplace(root, next);
    if (inserted) ++next;
    out.label[i] = it->second;
  }
  out.count = static_cast<int>(next);
  return out;
}

BallModel build_ball_model(const PointCloud& cloud, const GridCoverR& cover, int level,
                           const BallModel* force_parents_of) {
  cover.validate();
  require_cloud(cloud, "build_ball_model");
  if (level < 1 || level > cover.j_max) {
    throw std::domain_error("build_ball_model: level out of range");
  }
  BallModel model;
  model.level = level;
  model.dim = cloud.dim;
  model.radius = cover.ball_radius(level);

  std::unordered_map<LatticeCoord, std::uint32_t, LatticeCoordHash> index_of;
  auto ball_at = [&](const LatticeCoord& k) {
    auto [it, inserted] = index_of.emplace(k, static_cast<std::uint32_t>(model.coords.size()));
    if (inserted) {
      model.coords.push_back(k);
      model.members.emplace_back();
      double pos[4];
      cover.position(level, k, pos);
      model.centers.insert(model.centers.end(), pos, pos + cloud.dim);
    }
    return it->second;
  };

  const double meet_radius = model.radius * (1.0 + 1e-12);
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    cover.for_lattice_near(level, cloud.point(i), meet_radius, [&](const LatticeCoord& k) {
      model.members[ball_at(k)].push_back(static_cast<std::uint32_t>(i));
    });
  }
  if (force_parents_of != nullptr) {
    // Nesting guarantee: the parent of every finer ball belongs to this level,
    // carrying at least its child's members.
    for (std::size_t b = 0; b < force_parents_of->n_balls(); ++b) {
      const std::uint32_t pb = ball_at(GridCoverR::parent(force_parents_of->coords[b]));
      auto& mem = model.members[pb];
      mem.insert(mem.end(), force_parents_of->members[b].begin(),
                 force_parents_of->members[b].end());
    }
    for (auto& mem : model.members) {
      std::sort(mem.begin(), mem.end());
      mem.erase(std::unique(mem.begin(), mem.end()), mem.end());
    }
  }

  // Overlap graph; the distance test is exact on integer coordinates:
  // |c_a - c_b|^2 < 4 d  <=>  center distance < 2 * 2^{-level}.
  const std::size_t n_balls = model.n_balls();
  const int dim = cloud.dim;
  const SpatialHash center_hash(model.centers, dim, 2.0 * model.radius);
  std::vector<std::vector<std::uint32_t>> adj(n_balls);
  const std::int64_t overlap_limit = 4 * static_cast<std::int64_t>(dim);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    center_hash.for_neighbors(model.center(b), 2.0 * model.radius * (1.0 + 1e-9),
                              [&](std::uint32_t o) {
                                if (o == b) return;
                                std::int64_t q = 0;
                                for (int i = 0; i < dim; ++i) {
                                  const std::int64_t d = model.coords[b].c[i] - model.coords[o].c[i];
                                  q += d * d;
                                }
                                if (q < overlap_limit) adj[b].push_back(o);
                              });
    std::sort(adj[b].begin(), adj[b].end());
  }
  model.adjacency_start.assign(n_balls + 1, 0);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    model.adjacency_start[b + 1] =
        model.adjacency_start[b] + static_cast<std::uint32_t>(adj[b].size());
  }
  model.adjacency.reserve(model.adjacency_start[n_balls]);
  for (auto& row : adj) {
    model.adjacency.insert(model.adjacency.end(), row.begin(), row.end());
  }
  return model;
}

int ComponentForest::deep_big_count() const {
  int count = 0;
  const LevelComponents& deep = levels.back();
  for (std::size_t c = 0; c < deep.n_components(); ++c) {
    if (deep.diameter[c] >= delta) ++count;
  }
  return count;
}

int ComponentForest::survivor_count(int level) const {
  const LevelComponents& lc = levels[static_cast<std::size_t>(level - 1)];
  int count = 0;
  for (std::uint8_t s : lc.survivor) count += s;
  return count;
}

ComponentForest build_component_forest(const PointCloud& cloud, double delta, int j_max) {
  require_cloud(cloud, "build_component_forest");
  require_unit_ball(cloud, "build_component_forest");
  if (!(delta > 0.0)) throw std::domain_error("build_component_forest: delta must be > 0");
  if (delta <= 4.0 * cloud.resolution) {
    throw UnreliableInputError("build_component_forest: delta at or below 4x resolution");
  }
  ComponentForest forest;
  forest.delta = delta;
  forest.j_deep = consistent_depth(cloud, j_max, "build_component_forest");
  forest.cover = GridCoverR{cloud.dim, 1.0, std::max(forest.j_deep, 1)};
  forest.cover.validate();

  forest.models.resize(static_cast<std::size_t>(forest.j_deep));
  for (int j = forest.j_deep; j >= 1; --j) {
    const BallModel* finer =
        j == forest.j_deep ? nullptr : &forest.models[static_cast<std::size_t>(j)];
    forest.models[static_cast<std::size_t>(j - 1)] =
        build_ball_model(cloud, forest.cover, j, finer);
  }

  const std::vector<double> dirs = extent_directions(cloud.dim);
  forest.levels.resize(static_cast<std::size_t>(forest.j_deep));
  for (int j = 1; j <= forest.j_deep; ++j) {
    const BallModel& model = forest.models[static_cast<std::size_t>(j - 1)];
    LevelComponents lc;
    lc.level = j;
    lc.component_of = model_components(model);
    const auto groups = group_by_component(lc.component_of);
    lc.diameter.resize(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
      lc.diameter[c] =
          center_spread(dirs, model.dim, model.centers.data(), groups[c]) + 2.0 * model.radius;
    }
    lc.parent.assign(groups.size(), -1);
    lc.survivor.assign(groups.size(), 0);
    forest.levels[static_cast<std::size_t>(j - 1)] = std::move(lc);
  }

  // Parent maps via lattice nesting: any member ball determines the coarser
  // component (the coarser union contains the finer one).
  for (int j = 2; j <= forest.j_deep; ++j) {
    const BallModel& fine = forest.models[static_cast<std::size_t>(j - 1)];
    const BallModel& coarse = forest.models[static_cast<std::size_t>(j - 2)];
    std::unordered_map<LatticeCoord, std::uint32_t, LatticeCoordHash> coarse_index;
    for (std::uint32_t b = 0; b < coarse.n_balls(); ++b) coarse_index.emplace(coarse.coords[b], b);
    LevelComponents& lc = forest.levels[static_cast<std::size_t>(j - 1)];
    const LevelComponents& up = forest.levels[static_cast<std::size_t>(j - 2)];
    for (std::uint32_t b = 0; b < fine.n_balls(); ++b) {
      const auto it = coarse_index.find(GridCoverR::parent(fine.coords[b]));
      if (it == coarse_index.end()) {
        throw std::logic_error("build_component_forest: nesting violated");
      }
      lc.parent[lc.component_of[b]] = static_cast<std::int32_t>(up.component_of[it->second]);
    }
  }

  // Survivors: deepest-level components of diameter >= delta, propagated up.
  LevelComponents& deep = forest.levels.back();
  for (std::size_t c = 0; c < deep.n_components(); ++c) {
    deep.survivor[c] = deep.diameter[c] >= delta ? 1 : 0;
  }
  for (int j = forest.j_deep; j >= 2; --j) {
    const LevelComponents& lc = forest.levels[static_cast<std::size_t>(j - 1)];
    LevelComponents& up = forest.levels[static_cast<std::size_t>(j - 2)];
    for (std::size_t c = 0; c < lc.n_components(); ++c) {
      if (lc.survivor[c] && lc.parent[c] >= 0) {
        up.survivor[static_cast<std::size_t>(lc.parent[c])] = 1;
      }
    }
  }
  return forest;
}

int component_count_N_delta(const PointCloud& cloud, double delta, int j_max) {
  return build_component_forest(cloud, delta, j_max).deep_big_count();
}

namespace {

// Component counting for punctured clouds. Removing the points inside one
// ball must be judged on a count model strictly finer than the removal:
// with balls of the removal's own size, the survivors flanking the hole stay
// center-adjacent across it and no removal would ever disconnect anything.
// Two levels down the hole is wider than the finer adjacency reach, so a
// genuine gap always registers.
//
// The count model of the punctured cloud is the original model minus the
// balls all of whose members were removed (membership only shrinks, the
// overlap graph is center-based), so each query marks those balls dead and
// counts delta-big components among the rest. Components that never touch
// the dead zone keep their original extents; the touched remainder is
// explored by a BFS seeded on the alive neighbors of the dead zone, merging
// seed groups as their frontiers meet. The common case, one surviving group,
// exits as soon as the merge happens.
class PuncturedCount {
 public:
  PuncturedCount(const PointCloud& cloud, const BallModel& count, double delta,
                 double removal_radius)
      : cloud_(cloud),
        count_(count),
        delta_(delta),
        hash_(count.centers, count.dim, std::max(removal_radius + count.radius, 1e-12)),
        dirs_(extent_directions(count.dim)),
        n_dirs_(dirs_.size() / static_cast<std::size_t>(count.dim)),
        comp_of_(model_components(count)),
        dead_(count.n_balls(), 0),
        seen_(count.n_balls(), 0),
        group_of_(count.n_balls(), 0) {
    const auto groups = group_by_component(comp_of_);
    comp_big_.assign(groups.size(), 0);
    comp_hit_.assign(groups.size(), 0);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const double diam =
          center_spread(dirs_, count_.dim, count_.centers.data(), groups[c]) + 2.0 * count_.radius;
      if (diam >= delta_) {
        comp_big_[c] = 1;
        ++global_big_;
      }
    }
  }

  // True when deleting the cloud points within removal_r of cb leaves at
  // least two delta-big components of the count model.
  bool removal_splits(const double* cb, double removal_r) {
    const int dim = count_.dim;
    const double rr2 = removal_r * removal_r;
    touched_.clear();
    hash_.for_neighbors(cb, (removal_r + count_.radius) * (1.0 + 1e-9), [&](std::uint32_t o) {
      for (std::uint32_t m : count_.members[o]) {
        if (dist2(cloud_.point(m), cb, dim) > rr2) return;
      }
      dead_[o] = 1;
      touched_.push_back(o);
    });
    if (touched_.empty()) return global_big_ >= 2;

    int untouched_big = global_big_;
    hit_comps_.clear();
    for (std::uint32_t o : touched_) {
      const std::uint32_t c = comp_of_[o];
      if (comp_big_[c] && !comp_hit_[c]) {
        comp_hit_[c] = 1;
        hit_comps_.push_back(c);
        --untouched_big;
      }
    }
    for (std::uint32_t c : hit_comps_) comp_hit_[c] = 0;
    if (untouched_big >= 2) {
      clear_dead();
      return true;
    }

    ++epoch_;
    queue_.clear();
    group_parent_.clear();
    group_big_.clear();
    group_ext_.clear();
    n_groups_ = 0;
    big_groups_ = 0;
    for (std::uint32_t o : touched_) {
      for (std::uint32_t e = count_.adjacency_start[o]; e < count_.adjacency_start[o + 1]; ++e) {
        const std::uint32_t v = count_.adjacency[e];
        if (dead_[v] || seen_[v] == epoch_) continue;
        seen_[v] = epoch_;
        group_of_[v] = new_group(count_.center(v));
        queue_.push_back(v);
      }
    }
    if (untouched_big == 1 && big_groups_ >= 1) {
      clear_dead();
      return true;
    }

    std::size_t head = 0;
    while (head < queue_.size()) {
      const std::uint32_t u = queue_[head++];
      std::uint32_t gu = find_group(group_of_[u]);
      for (std::uint32_t e = count_.adjacency_start[u]; e < count_.adjacency_start[u + 1]; ++e) {
        const std::uint32_t v = count_.adjacency[e];
        if (dead_[v]) continue;
        if (seen_[v] != epoch_) {
          seen_[v] = epoch_;
          group_of_[v] = gu;
          absorb(gu, count_.center(v));
          queue_.push_back(v);
        } else {
          const std::uint32_t gv = find_group(group_of_[v]);
          if (gv == gu) continue;
          gu = unite_groups(gu, gv);
          if (n_groups_ == 1 && untouched_big == 0) {
            clear_dead();
            return false;
          }
        }
        if (untouched_big == 1 && big_groups_ >= 1) {
          clear_dead();
          return true;
        }
      }
    }
    clear_dead();
    return untouched_big + big_groups_ >= 2;
  }

 private:
  void clear_dead() {
    for (std::uint32_t o : touched_) dead_[o] = 0;
  }

  std::uint32_t find_group(std::uint32_t g) {
    while (group_parent_[g] != g) {
      group_parent_[g] = group_parent_[group_parent_[g]];
      g = group_parent_[g];
    }
    return g;
  }

  double* extents(std::uint32_t g) { return group_ext_.data() + g * 2 * n_dirs_; }

  void mark_if_big(std::uint32_t g) {
    if (group_big_[g]) return;
    const double* ex = extents(g);
    for (std::size_t d = 0; d < n_dirs_; ++d) {
      if (ex[2 * d + 1] - ex[2 * d] + 2.0 * count_.radius >= delta_) {
        group_big_[g] = 1;
        ++big_groups_;
        return;
      }
    }
  }

  void absorb(std::uint32_t g, const double* center) {
    double* ex = extents(g);
    for (std::size_t d = 0; d < n_dirs_; ++d) {
      const double s =
          dot(center, dirs_.data() + d * static_cast<std::size_t>(count_.dim), count_.dim);
      ex[2 * d] = std::min(ex[2 * d], s);
      ex[2 * d + 1] = std::max(ex[2 * d + 1], s);
    }
    mark_if_big(g);
  }

  std::uint32_t new_group(const double* center) {
    const std::uint32_t g = static_cast<std::uint32_t>(group_parent_.size());
    group_parent_.push_back(g);
    group_big_.push_back(0);
    group_ext_.resize(group_ext_.size() + 2 * n_dirs_);
    double* ex = extents(g);
    for (std::size_t d = 0; d < n_dirs_; ++d) {
      ex[2 * d] = std::numeric_limits<double>::infinity();
      ex[2 * d + 1] = -std::numeric_limits<double>::infinity();
    }
    ++n_groups_;
    absorb(g, center);
    return g;
  }

  std::uint32_t unite_groups(std::uint32_t a, std::uint32_t b) {
    group_parent_[b] = a;
    double* ea = extents(a);
    const double* eb = extents(b);
    for (std::size_t d = 0; d < n_dirs_; ++d) {
      ea[2 * d] = std::min(ea[2 * d], eb[2 * d]);
      ea[2 * d + 1] = std::max(ea[2 * d + 1], eb[2 * d + 1]);
    }
    if (group_big_[a] && group_big_[b]) --big_groups_;
    if (group_big_[b]) group_big_[a] = 1;
    mark_if_big(a);
    --n_groups_;
    return a;
  }

  const PointCloud& cloud_;
  const BallModel& count_;
  double delta_;
  SpatialHash hash_;
  std::vector<double> dirs_;
  std::size_t n_dirs_;
  std::vector<std::uint32_t> comp_of_;
  std::vector<std::uint8_t> comp_big_;
  std::vector<std::uint8_t> comp_hit_;
  int global_big_ = 0;

  std::vector<std::uint8_t> dead_;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> group_of_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> hit_comps_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::uint32_t> group_parent_;
  std::vector<std::uint8_t> group_big_;
  std::vector<double> group_ext_;
  std::uint32_t epoch_ = 0;
  std::size_t n_groups_ = 0;
  int big_groups_ = 0;
};

// Balls of the removal model whose punctured count reaches two; when
// `candidate` is given, only flagged balls are tested.
std::vector<std::uint32_t> raw_cut_balls(const BallModel& removal, PuncturedCount& probe,
                                         const std::vector<std::uint8_t>* candidate = nullptr) {
  std::vector<std::uint32_t> cuts;
  for (std::uint32_t b = 0; b < removal.n_balls(); ++b) {
    if (candidate != nullptr && !(*candidate)[b]) continue;
    if (probe.removal_splits(removal.center(b), removal.radius)) cuts.push_back(b);
  }
  return cuts;
}

PointCloud centers_cloud(const BallModel& model, const std::vector<std::uint32_t>& balls) {
  PointCloud out;
  out.dim = model.dim;
  for (std::uint32_t b : balls) out.push(model.center(b));
  return out;
}

}  // namespace

PointCloud delta_cutpoints(const PointCloud& cloud, double delta, int j) {
  require_cloud(cloud, "delta_cutpoints");
  require_unit_ball(cloud, "delta_cutpoints");
  if (!(delta > 0.0)) throw std::domain_error("delta_cutpoints: delta must be > 0");
  if (delta <= 4.0 * cloud.resolution) {
    throw UnreliableInputError("delta_cutpoints: delta at or below 4x resolution");
  }
  if (j < 1 || j > 20) throw std::domain_error("delta_cutpoints: level out of range");

  // Counting depth per pass: two levels below the removal when the resolution
  // supports it, one otherwise; a pass that cannot count below its own scale
  // is dropped (see PuncturedCount).
  const int j_deep = consistent_depth(cloud, j + 2, "delta_cutpoints");
  GridCoverR cover{cloud.dim, 1.0, std::max(j, j_deep)};
  cover.validate();

  PointCloud out;
  out.dim = cloud.dim;

  if (j == 1) {
    const int count_level = std::min(3, j_deep);
    if (count_level < 2) return out;
    const BallModel removal = build_ball_model(cloud, cover, 1);
    const BallModel count = build_ball_model(cloud, cover, count_level);
    PuncturedCount probe(cloud, count, delta, removal.radius);
    return centers_cloud(removal, raw_cut_balls(removal, probe));
  }

  // Window intersection with the coarser level: a fine center survives only
  // when it lies in some coarse cut ball, so the coarse pass runs first and
  // prunes the fine candidates.
  const int coarse_count_level = std::min(j + 1, j_deep);
  if (coarse_count_level < j) return out;
  const BallModel coarse_removal = build_ball_model(cloud, cover, j - 1);
  const BallModel coarse_count = build_ball_model(cloud, cover, coarse_count_level);
  std::vector<std::uint32_t> coarse_cuts;
  {
    PuncturedCount probe(cloud, coarse_count, delta, coarse_removal.radius);
    coarse_cuts = raw_cut_balls(coarse_removal, probe);
  }
  if (coarse_cuts.empty()) return out;

  const int fine_count_level = std::min(j + 2, j_deep);
  if (fine_count_level < j + 1) {
    // The resolution cannot support counting below level j; the coarse pass
    // stands alone.
    for (std::uint32_t b : coarse_cuts) out.push(coarse_removal.center(b));
    return out;
  }

  const PointCloud coarse = centers_cloud(coarse_removal, coarse_cuts);
  const BallModel removal = build_ball_model(cloud, cover, j);
  const double keep_radius = cover.ball_radius(j - 1);
  const SpatialHash coarse_hash(coarse.points, coarse.dim, keep_radius);
  std::vector<std::uint8_t> candidate(removal.n_balls(), 0);
  for (std::uint32_t b = 0; b < removal.n_balls(); ++b) {
    coarse_hash.for_neighbors(removal.center(b), keep_radius,
                              [&](std::uint32_t) { candidate[b] = 1; });
  }
  BallModel fine_count_storage;
  const BallModel* fine_count = &coarse_count;
  if (fine_count_level != coarse_count_level) {
    fine_count_storage = build_ball_model(cloud, cover, fine_count_level);
    fine_count = &fine_count_storage;
  }
  PuncturedCount probe(cloud, *fine_count, delta, removal.radius);
  const std::vector<std::uint32_t> cuts = raw_cut_balls(removal, probe, &candidate);
  for (std::uint32_t b : cuts) out.push(removal.center(b));
  return out;
}

namespace {

// A discrete path touches its cut position from both time-sides, so the
// disjointness test ignores points inside the gap_tol-ball around the
// candidate: index k is a cut when the prefix up to its last exit from that
// ball and the suffix from its first re-exit stay more than gap_tol apart.
// A side that never leaves the ball gives only vacuous separation and
// disqualifies the candidate.
std::vector<std::uint32_t> cut_indices(const SamplePath& path, double gap_tol) {
  const std::size_t n_pts = path.grid.n_points();
  const int dim = path.dim;
  std::vector<std::uint32_t> running_max(n_pts, 0);
  {
    const SpatialHash hash(path.points, dim, gap_tol);
    std::uint32_t running = 0;
    for (std::size_t i = 0; i < n_pts; ++i) {
      std::uint32_t last = static_cast<std::uint32_t>(i);
      hash.for_neighbors(path.point(i), gap_tol,
                         [&](std::uint32_t idx) { last = std::max(last, idx); });
      running = std::max(running, last);
      running_max[i] = running;
    }
  }
  const double g2 = gap_tol * gap_tol;
  std::vector<std::uint32_t> cuts;
  for (std::size_t k = 1; k + 1 < n_pts; ++k) {
    const double* c = path.point(k);
    std::int64_t left = -1;
    for (std::int64_t i = static_cast<std::int64_t>(k) - 1; i >= 0; --i) {
      if (dist2(path.point(static_cast<std::size_t>(i)), c, dim) > g2) {
        left = i;
        break;
      }
    }
    if (left < 0) continue;
    std::size_t right = 0;
    for (std::size_t j = k + 1; j < n_pts; ++j) {
      if (dist2(path.point(j), c, dim) > g2) {
        right = j;
        break;
      }
    }
    if (right == 0) continue;
    if (running_max[static_cast<std::size_t>(left)] < right) {
      cuts.push_back(static_cast<std::uint32_t>(k));
    }
  }
  return cuts;
}

}  // namespace

std::vector<double> cut_times_oracle(const SamplePath& path, double gap_tol) {
  const PointCloud cloud = cloud_from_path(path);
  if (!(gap_tol > cloud.resolution)) {
    throw UnreliableInputError("cut_times_oracle: gap_tol must exceed the path resolution");
  }
  std::vector<double> times;
  for (std::uint32_t k : cut_indices(path, gap_tol)) times.push_back(path.grid.time(k));
  return times;
}

std::vector<PointCloud> oracle_cut_positions_by_delta(const SamplePath& path, double gap_tol,
                                                      const std::vector<double>& deltas) {
  const PointCloud cloud = cloud_from_path(path);
  if (!(gap_tol > cloud.resolution)) {
    throw UnreliableInputError("oracle_cut_positions_by_delta: gap_tol too small");
  }
  const int dim = path.dim;
  const std::vector<double> dirs = extent_directions(dim);
  const std::size_t n_dirs = dirs.size() / static_cast<std::size_t>(dim);
  const std::size_t n_pts = cloud.n();

  // Directional-extent diameters of every prefix and suffix.
  std::vector<double> prefix(n_pts), suffix(n_pts);
  {
    std::vector<double> lo(n_dirs, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n_dirs, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < n_pts; ++k) {
      double best = 0.0;
      for (std::size_t d = 0; d < n_dirs; ++d) {
        const double s = dot(cloud.point(k), dirs.data() + d * dim, dim);
        lo[d] = std::min(lo[d], s);
        hi[d] = std::max(hi[d], s);
        best = std::max(best, hi[d] - lo[d]);
      }
      prefix[k] = best;
    }
    std::fill(lo.begin(), lo.end(), std::numeric_limits<double>::infinity());
    std::fill(hi.begin(), hi.end(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = n_pts; k-- > 0;) {
      double best = 0.0;
      for (std::size_t d = 0; d < n_dirs; ++d) {
        const double s = dot(cloud.point(k), dirs.data() + d * dim, dim);
        lo[d] = std::min(lo[d], s);
        hi[d] = std::max(hi[d], s);
        best = std::max(best, hi[d] - lo[d]);
      }
      suffix[k] = best;
    }
  }

  const std::vector<std::uint32_t> cuts = cut_indices(path, gap_tol);
  std::vector<PointCloud> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    PointCloud set;
    set.dim = dim;
    for (std::uint32_t k : cuts) {
      if (prefix[k] >= delta && suffix[k] >= delta) set.push(cloud.point(k));
    }
    out.push_back(std::move(set));
  }
  return out;
}

PhiResult endpoint_candidates_phi(const PointCloud& cloud,
                                  const std::vector<double>& delta_schedule, int j) {
  std::vector<PointCloud> cut_sets;
  cut_sets.reserve(delta_schedule.size());
  for (double delta : delta_schedule) cut_sets.push_back(delta_cutpoints(cloud, delta, j));
  return endpoint_candidates_phi_with_cuts(cloud, cut_sets, delta_schedule, j);
}

PhiResult endpoint_candidates_phi_with_cuts(const PointCloud& cloud,
                                            const std::vector<PointCloud>& cut_sets,
                                            const std::vector<double>& delta_schedule, int j) {
  require_cloud(cloud, "endpoint_candidates_phi");
  require_unit_ball(cloud, "endpoint_candidates_phi");
  if (delta_schedule.empty() || cut_sets.size() != delta_schedule.size()) {
    throw ConfigError("endpoint_candidates_phi: schedule and cut sets must align");
  }
  for (std::size_t i = 1; i < delta_schedule.size(); ++i) {
    if (!(delta_schedule[i] < delta_schedule[i - 1])) {
      throw ConfigError("endpoint_candidates_phi: schedule must decrease");
    }
  }
  if (delta_schedule.back() < 4.0 * cloud.resolution) {
    throw UnreliableInputError("endpoint_candidates_phi: schedule finer than the resolution");
  }
  if (j < 1) throw ConfigError("endpoint_candidates_phi: level must be >= 1");

  GridCoverR cover{cloud.dim, 1.0, j};
  cover.validate();
  const int dim = cloud.dim;
  const double r = cover.ball_radius(j);

  PhiResult result;
  result.dim = dim;
  result.cut_union.dim = dim;
  for (const PointCloud& cs : cut_sets) {
    result.cut_union.points.insert(result.cut_union.points.end(), cs.points.begin(),
                                   cs.points.end());
  }
  if (result.cut_union.n() == 0) {
    result.inconclusive = true;
    return result;
  }

  const BallModel model = build_ball_model(cloud, cover, j);
  const std::size_t n_balls = model.n_balls();

  // Remove cloud points lying in any cut ball.
  const SpatialHash cut_hash(result.cut_union.points, dim, std::max(r, 1e-12));
  std::vector<std::uint8_t> point_removed(cloud.n(), 0);
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    bool hit = false;
    cut_hash.for_neighbors(cloud.point(i), r, [&](std::uint32_t) { hit = true; });
    point_removed[i] = hit ? 1 : 0;
  }

  const double origin_exclusion = std::max(4.0 * cloud.resolution, 2.0 * r);
  std::vector<std::uint8_t> ball_alive(n_balls, 0);
  std::vector<std::uint8_t> ball_origin(n_balls, 0);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    for (std::uint32_t m : model.members[b]) {
      if (!point_removed[m]) ball_alive[b] = 1;
      if (norm2(cloud.point(m), dim) <= origin_exclusion * origin_exclusion) ball_origin[b] = 1;
    }
  }

  // Pieces: components of the alive ball graph.
  UnionFind uf(n_balls);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    if (!ball_alive[b]) continue;
    for (std::uint32_t e = model.adjacency_start[b]; e < model.adjacency_start[b + 1]; ++e) {
      const std::uint32_t o = model.adjacency[e];
      if (ball_alive[o]) uf.unite(b, o);
    }
  }
  std::unordered_map<std::uint32_t, std::uint32_t> piece_of_root;
  std::vector<std::uint32_t> piece_of(n_balls, UINT32_MAX);
  std::vector<std::vector<std::uint32_t>> piece_balls;
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    if (!ball_alive[b]) continue;
    const std::uint32_t root = uf.find(b);
    auto [it, inserted] =
        piece_of_root.emplace(root, static_cast<std::uint32_t>(piece_balls.size()));
    if (inserted) piece_balls.emplace_back();
    piece_of[b] = it->second;
    piece_balls[it->second].push_back(b);
  }

  // Cut clusters and piece degrees.
  const BruteComponents clusters = brute_components(result.cut_union, 2.0 * r);
  const std::size_t n_pieces = piece_balls.size();
  std::vector<std::vector<std::uint32_t>> piece_clusters(n_pieces);
  std::vector<double> piece_cut_dist(n_pieces, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> piece_nearest_cut(n_pieces, UINT32_MAX);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    if (!ball_alive[b]) continue;
    const std::uint32_t piece = piece_of[b];
    cut_hash.for_neighbors(model.center(b), 2.0 * r, [&](std::uint32_t cut_idx) {
      piece_clusters[piece].push_back(clusters.label[cut_idx]);
    });
    const std::int64_t nearest = cut_hash.nearest(model.center(b));
    if (nearest >= 0) {
      const double d =
          dist(model.center(b), result.cut_union.point(static_cast<std::size_t>(nearest)), dim);
      if (d < piece_cut_dist[piece]) {
        piece_cut_dist[piece] = d;
        piece_nearest_cut[piece] = static_cast<std::uint32_t>(nearest);
      }
    }
  }
  for (auto& pc : piece_clusters) {
    std::sort(pc.begin(), pc.end());
    pc.erase(std::unique(pc.begin(), pc.end()), pc.end());
  }
  std::vector<std::uint8_t> piece_origin(n_pieces, 0);
  for (std::uint32_t b = 0; b < n_balls; ++b) {
    if (ball_alive[b] && ball_origin[b]) piece_origin[piece_of[b]] = 1;
  }

  // Graph depth from the origin region over the full (uncut) model.
  std::vector<double> depth(n_balls, -1.0);
  {
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t b = 0; b < n_balls; ++b) {
      if (ball_origin[b]) {
        depth[b] = 0.0;
        frontier.push_back(b);
      }
    }
    std::vector<std::uint32_t> next;
    double level = 0.0;
    while (!frontier.empty()) {
      next.clear();
      ++level;
      for (std::uint32_t b : frontier) {
        for (std::uint32_t e = model.adjacency_start[b]; e < model.adjacency_start[b + 1]; ++e) {
          const std::uint32_t o = model.adjacency[e];
          if (depth[o] < 0.0) {
            depth[o] = level;
            next.push_back(o);
          }
        }
      }
      frontier.swap(next);
    }
  }

  // Candidate pieces: touch at most one cut cluster and avoid the origin.
  for (std::uint32_t piece = 0; piece < n_pieces; ++piece) {
    if (piece_origin[piece]) continue;
    if (piece_clusters[piece].size() > 1) continue;
    if (piece_nearest_cut[piece] == UINT32_MAX) continue;

    // Attachment: the balls of the piece adjacent to its cut cluster, or the
    // ball nearest to the cut set when the piece was severed cleanly.
    std::vector<std::uint32_t> attach;
    if (!piece_clusters[piece].empty()) {
      const std::uint32_t cluster = piece_clusters[piece][0];
      for (std::uint32_t b : piece_balls[piece]) {
        bool adj = false;
        cut_hash.for_neighbors(model.center(b), 2.0 * r, [&](std::uint32_t cut_idx) {
          if (clusters.label[cut_idx] == cluster) adj = true;
        });
        if (adj) attach.push_back(b);
      }
    }
    if (attach.empty()) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_ball = piece_balls[piece][0];
      const double* cut_pt = result.cut_union.point(piece_nearest_cut[piece]);
      for (std::uint32_t b : piece_balls[piece]) {
        const double d = dist2(model.center(b), cut_pt, dim);
        if (d < best) {
          best = d;
          best_ball = b;
        }
      }
      attach.push_back(best_ball);
    }

    // Tip: BFS inside the piece from the attachment; farthest ball wins,
    // smaller index on ties.
    std::vector<double> piece_depth(n_balls, -1.0);
    std::vector<std::uint32_t> frontier = attach;
    for (std::uint32_t b : attach) piece_depth[b] = 0.0;
    std::vector<std::uint32_t> next;
    std::uint32_t tip_ball = attach[0];
    double tip_depth = 0.0;
    double level = 0.0;
    while (!frontier.empty()) {
      next.clear();
      ++level;
      for (std::uint32_t b : frontier) {
        for (std::uint32_t e = model.adjacency_start[b]; e < model.adjacency_start[b + 1]; ++e) {
          const std::uint32_t o = model.adjacency[e];
          if (piece_of[o] == piece && piece_depth[o] < 0.0) {
            piece_depth[o] = level;
            next.push_back(o);
            if (level > tip_depth || (level == tip_depth && o < tip_ball)) {
              tip_depth = level;
              tip_ball = o;
            }
          }
        }
      }
      frontier.swap(next);
    }
    const double* attach_center = model.center(attach[0]);
    double best_d = -1.0;
    std::uint32_t best_point = UINT32_MAX;
    for (std::uint32_t m : model.members[tip_ball]) {
      if (point_removed[m]) continue;
      const double d = dist2(cloud.point(m), attach_center, dim);
      if (d > best_d) {
        best_d = d;
        best_point = m;
      }
    }
    if (best_point == UINT32_MAX) continue;

    // The candidate must track the cut structure at every scale in the
    // schedule (limsup side of the construction).
    const double* tip = cloud.point(best_point);
    bool tracks = true;
    for (std::size_t i = 0; i < cut_sets.size(); ++i) {
      if (cut_sets[i].n() == 0) continue;  // empty layers carry no information
      const double tol = std::max(2.0 * delta_schedule[i], 4.0 * r) + 2.0 * r;
      const SpatialHash layer_hash(cut_sets[i].points, dim, tol);
      const std::int64_t nearest = layer_hash.nearest(tip);
      if (nearest < 0 ||
          dist(tip, cut_sets[i].point(static_cast<std::size_t>(nearest)), dim) > tol) {
        tracks = false;
        break;
      }
    }
    if (!tracks) continue;

    PhiCandidate cand;
    cand.tip.assign(tip, tip + dim);
    cand.depth = depth[tip_ball];
    cand.piece = piece;
    result.candidates.push_back(std::move(cand));
  }

  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const PhiCandidate& a, const PhiCandidate& b) {
              if (a.depth != b.depth) return a.depth > b.depth;
              return std::lexicographical_compare(a.tip.begin(), a.tip.end(), b.tip.begin(),
                                                  b.tip.end());
            });
  result.inconclusive = result.candidates.empty();
  return result;
}

}  // namespace occlab
