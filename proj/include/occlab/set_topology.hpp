#pragma once

// Set machinery on finite point clouds: Hausdorff distance and a tail-rule
// limsup, multiscale component counting over nested lattice ball models,
// delta-cutpoint extraction, a parametric cut-time oracle for discretized
// paths, and the endpoint extractor built from the cut structure.

#include <cstdint>
#include <optional>
#include <vector>

#include "occlab/cover.hpp"
#include "occlab/path_engine.hpp"

namespace occlab {

struct PointCloud {
  int dim = 0;
  std::vector<double> points;  // n * dim
  // Max gap between consecutive samples when the cloud discretizes a path;
  // 0 for abstract clouds.
  double resolution = 0.0;

  std::size_t n() const { return dim == 0 ? 0 : points.size() / static_cast<std::size_t>(dim); }
  const double* point(std::size_t i) const {
    return points.data() + i * static_cast<std::size_t>(dim);
  }
  void push(const double* p) { points.insert(points.end(), p, p + dim); }
};

PointCloud cloud_from_path(const SamplePath& path);

// Exact max of directed sup-inf distances; domain error on empty input.
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

// Diameter via directional extents over the {-1,0,1}^dim direction set; a
// lower bound within ~10% of the exact diameter, linear in the cloud size.
double directional_diameter(const PointCloud& cloud);

// Tail-rule limsup surrogate: points (drawn from the tail sets) lying within
// tol of every set with index >= tail_start.
PointCloud hausdorff_limsup(const std::vector<PointCloud>& sets, std::size_t tail_start,
                            double tol);

struct BruteComponents {
  int count = 0;
  std::vector<std::uint32_t> label;  // consecutive ids ordered by smallest member index
};

// Union-find over links of length <= link_radius.
BruteComponents brute_components(const PointCloud& cloud, double link_radius);

// Lattice balls of radius 2^{-level} that meet the cloud, with membership
// lists and the overlap graph (center distance < 2 * radius).
struct BallModel {
  int level = 0;
  int dim = 0;
  double radius = 0.0;
  std::vector<LatticeCoord> coords;
  std::vector<double> centers;  // n_balls * dim
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<std::uint32_t> adjacency_start;  // CSR over n_balls + 1
  std::vector<std::uint32_t> adjacency;

  std::size_t n_balls() const { return coords.size(); }
  const double* center(std::size_t b) const {
    return centers.data() + b * static_cast<std::size_t>(dim);
  }
};

// Builds the level-j model; when force_parents_of is given, parents of that
// model's balls are included so nesting holds exactly.
BallModel build_ball_model(const PointCloud& cloud, const GridCoverR& cover, int level,
                           const BallModel* force_parents_of = nullptr);

struct LevelComponents {
  int level = 0;
  std::vector<std::uint32_t> component_of;  // per ball
  std::vector<double> diameter;             // per component (center spread + ball diameter)
  std::vector<std::int32_t> parent;         // component index one level up, -1 at the root level
  std::vector<std::uint8_t> survivor;       // has a delta-big deepest-level descendant
  std::size_t n_components() const { return diameter.size(); }
};

struct ComponentForest {
  GridCoverR cover;
  double delta = 0.0;
  int j_deep = 0;
  std::vector<BallModel> models;        // levels 1..j_deep
  std::vector<LevelComponents> levels;  // parallel to models

  int deep_big_count() const;
  int survivor_count(int level) const;
};

// Nested ball models for levels 1..j_deep where j_deep is the deepest level
// with 2^{-j} >= 4 * resolution (j_max when resolution = 0), with parent maps
// and survivor flags relative to delta.
ComponentForest build_component_forest(const PointCloud& cloud, double delta, int j_max);

// Number of components of diameter >= delta at the deepest consistent level.
// Unreliable-input error when delta <= 4 * resolution; config error when the
// cloud leaves the unit ball.
int component_count_N_delta(const PointCloud& cloud, double delta, int j_max);

// Centers of level-j balls whose removal (all cloud points within 2^{-j} of
// the center) leaves at least two components of diameter >= delta, counted on
// a ball model up to two levels finer so the hole is wider than the count
// adjacency reach. Kept centers must also lie in some level-(j-1) cut ball
// (window surrogate of the limit over j); when the resolution cannot support
// counting below level j the coarser pass stands alone, and when it cannot
// support counting below level j-1 either the result is empty.
PointCloud delta_cutpoints(const PointCloud& cloud, double delta, int j);

// Times t_k (interior grid times) at which the early and late path segments
// {points before k} and {points after k} stay more than gap_tol apart.
std::vector<double> cut_times_oracle(const SamplePath& path, double gap_tol);

// Cut positions per delta, qualified by requiring both path segments to have
// (directional-extent) diameter >= delta. Oracle-side input for the endpoint
// extractor, bypassing the set-based cut detection.
std::vector<PointCloud> oracle_cut_positions_by_delta(const SamplePath& path, double gap_tol,
                                                      const std::vector<double>& deltas);

struct PhiCandidate {
  std::vector<double> tip;   // dim entries
  double depth = 0.0;        // graph distance from the origin-side structure
  std::uint32_t piece = 0;   // piece id, for diagnostics
};

struct PhiResult {
  int dim = 0;
  std::vector<PhiCandidate> candidates;
  bool inconclusive = false;
  PointCloud cut_union;  // all cut centers used, diagnostic
};

// Endpoint candidates: tips of terminal pieces of the cloud after removing
// the union of delta-cut balls, where a terminal piece touches at most one
// cut cluster, avoids the origin region, and sits within a delta-scaled
// tolerance of the cut set for every delta in the schedule.
PhiResult endpoint_candidates_phi(const PointCloud& cloud,
                                  const std::vector<double>& delta_schedule, int j);

// Same extraction with externally supplied cut sets (one per schedule entry).
PhiResult endpoint_candidates_phi_with_cuts(const PointCloud& cloud,
                                            const std::vector<PointCloud>& cut_sets,
                                            const std::vector<double>& delta_schedule, int j);

}  // namespace occlab
