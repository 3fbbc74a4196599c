#include "occlab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "occlab/errors.hpp"
#include "occlab/geom.hpp"

namespace occlab {

namespace {

int level_for_radius(const CoverHierarchy& cover, double r) {
  int j = 1;
  while (j < cover.j_max && cover.cap_radius(j) > r * (1.0 + 1e-12)) ++j;
  return j;
}

double thickness_denominator(int dim, double r, double kappa_highd) {
  const double lg = std::log(r);
  if (dim == 3) return 2.0 * r * r * lg * lg;
  return kappa_highd * r * r * std::abs(lg);
}

// Mass of every cap of the given radius centered at the level's cover points.
std::vector<double> level_mass_table(const OccupationMeasure& mu, const CoverHierarchy& cover,
                                     int level, double radius) {
  std::vector<double> mass(cover.n_points(level), 0.0);
  const SpatialHash hash(cover.levels[static_cast<std::size_t>(level - 1)], mu.dim,
                         std::max(radius, 1e-12));
  for (std::size_t a = 0; a < mu.n_atoms(); ++a) {
    const double w = mu.weights[a];
    hash.for_neighbors(mu.direction(a), radius,
                       [&](std::uint32_t g) { mass[g] += w; });
  }
  return mass;
}

void require_dim(const OccupationMeasure& mu, const CoverHierarchy& cover, const char* where) {
  if (mu.dim != cover.dim) throw ConfigError(std::string(where) + ": dimension mismatch");
  if (mu.dim < 3) throw ConfigError(std::string(where) + ": needs dimension >= 3");
}

}  // namespace

double rho_r_min(const OccupationMeasure& mu) {
  if (mu.n_atoms() == 0) throw ConfigError("rho_r_min: empty measure");
  return 4.0 / std::sqrt(static_cast<double>(mu.n_atoms()));
}

RhoEstimate rho_estimate(const OccupationMeasure& mu, const Cap& cap,
                         const CoverHierarchy& cover, const RhoParams& params) {
  require_dim(mu, cover, "rho_estimate");
  if (params.radii.empty()) throw ConfigError("rho_estimate: empty radius schedule");
  const double r_min = rho_r_min(mu);
  for (std::size_t i = 0; i < params.radii.size(); ++i) {
    const double r = params.radii[i];
    if (i > 0 && !(r < params.radii[i - 1])) {
      throw ConfigError("rho_estimate: radii must decrease");
    }
    if (!(r <= cap.radius)) throw ConfigError("rho_estimate: radius exceeds the cap");
    if (!(r > r_min)) {
      throw UnreliableInputError("rho_estimate: schedule reaches below the atom noise scale");
    }
  }

  RhoEstimate est;
  est.cap = cap;
  double best_ratio = 0.0;
  for (double r : params.radii) {
    const int level = level_for_radius(cover, r);
    const std::vector<double> mass = level_mass_table(mu, cover, level, r);
    const double allow = cap.radius - r;
    double best_mass = 0.0;
    if (allow >= 0.0) {
      const double allow2 = allow * allow;
      for (std::size_t g = 0; g < cover.n_points(level); ++g) {
        if (dist2(cover.point(level, g), cap.center.data(), mu.dim) <= allow2) {
          best_mass = std::max(best_mass, mass[g]);
        }
      }
    }
    const double ratio = best_mass / thickness_denominator(mu.dim, r, params.kappa_highd);
    est.profile.emplace_back(r, ratio);
    best_ratio = std::max(best_ratio, ratio);
  }
  est.value = std::sqrt(best_ratio);
  return est;
}

std::vector<PointCloud> radial_level_sets(const OccupationMeasure& mu,
                                          const CoverHierarchy& cover,
                                          const PsiParams& params) {
  require_dim(mu, cover, "radial_level_sets");
  if (params.j_range.empty()) throw ConfigError("radial_level_sets: empty level range");
  const double r_min = rho_r_min(mu);
  const int dim = mu.dim;

  // Shared mass tables and point hashes for every sub-cap level in play.
  int j_sub_min = cover.j_max + 1, j_sub_max = 0;
  for (int j : params.j_range) {
    if (j < 1 || j >= cover.j_max) {
      throw ConfigError("radial_level_sets: levels must leave room for sub-caps");
    }
    j_sub_min = std::min(j_sub_min, j + 1);
    j_sub_max = cover.j_max;
  }
  std::unordered_map<int, std::vector<double>> tables;
  std::map<int, SpatialHash> hashes;
  std::vector<int> usable;
  for (int js = j_sub_min; js <= j_sub_max; ++js) {
    if (cover.cap_radius(js) > r_min) {
      tables.emplace(js, level_mass_table(mu, cover, js, cover.cap_radius(js)));
      hashes.emplace(js, SpatialHash(cover.levels[static_cast<std::size_t>(js - 1)], dim,
                                     cover.cap_radius(js)));
      usable.push_back(js);
    }
  }
  if (usable.empty()) {
    throw UnreliableInputError("radial_level_sets: no sub-cap level above the noise scale");
  }

  std::vector<PointCloud> sets;
  sets.reserve(params.j_range.size());
  for (int j : params.j_range) {
    const double r_cap = cover.cap_radius(j);
    PointCloud a_j;
    a_j.dim = dim;
    for (std::size_t i = 0; i < cover.n_points(j); ++i) {
      const double* cen = cover.point(j, i);
      double best_ratio = 0.0;
      for (int js : usable) {
        if (js <= j) continue;
        const double r = cover.cap_radius(js);
        const double allow = r_cap - r;
        if (allow < 0.0) continue;
        const std::vector<double>& mass = tables.at(js);
        double best_mass = 0.0;
        hashes.at(js).for_neighbors(cen, allow, [&](std::uint32_t g) {
          best_mass = std::max(best_mass, mass[g]);
        });
        best_ratio = std::max(
            best_ratio, best_mass / thickness_denominator(dim, r, params.kappa_highd));
      }
      const double rho = std::sqrt(best_ratio);
      for (int c = 0; c < dim; ++c) a_j.points.push_back(rho * cen[c]);
    }
    sets.push_back(std::move(a_j));
  }
  return sets;
}

PointCloud reconstruct_range_psi(const OccupationMeasure& mu, const CoverHierarchy& cover,
                                 const PsiParams& params) {
  const std::vector<PointCloud> sets = radial_level_sets(mu, cover, params);
  return hausdorff_limsup(sets, 0, params.limsup_tol);
}

namespace {

PointCloud scaled_cloud(const PointCloud& cloud, double factor) {
  PointCloud out;
  out.dim = cloud.dim;
  out.resolution = cloud.resolution * factor;
  out.points.reserve(cloud.points.size());
  for (double x : cloud.points) out.points.push_back(x * factor);
  return out;
}

double max_norm(const PointCloud& cloud) {
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.n(); ++i) best = std::max(best, norm2(cloud.point(i), cloud.dim));
  return std::sqrt(best);
}

void apply_phi(RecoveryReport& report, const PointCloud& cloud,
               const std::vector<PointCloud>* cut_sets, const EndpointParams& params) {
  const double radius = max_norm(cloud);
  if (radius <= 0.0) {
    report.inconclusive = true;
    return;
  }
  const double scale = radius * 1.02;
  report.scale = scale;
  const PointCloud unit = scaled_cloud(cloud, 1.0 / scale);
  PhiResult phi;
  try {
    if (cut_sets != nullptr) {
      std::vector<PointCloud> scaled_cuts;
      scaled_cuts.reserve(cut_sets->size());
      for (const PointCloud& cs : *cut_sets) scaled_cuts.push_back(scaled_cloud(cs, 1.0 / scale));
      phi = endpoint_candidates_phi_with_cuts(unit, scaled_cuts, params.delta_schedule,
                                              params.phi_level);
    } else {
      phi = endpoint_candidates_phi(unit, params.delta_schedule, params.phi_level);
    }
  } catch (const UnreliableInputError&) {
    report.inconclusive = true;
    return;
  }
  report.n_candidates = phi.candidates.size();
  if (phi.inconclusive) {
    report.inconclusive = true;
    return;
  }
  std::vector<double> endpoint = phi.candidates.front().tip;
  for (double& x : endpoint) x *= scale;
  report.endpoint_estimate = std::move(endpoint);
}

}  // namespace

RecoveryReport recover_endpoint(const OccupationMeasure& mu, const CoverHierarchy& cover,
                                const PsiParams& psi_params,
                                const EndpointParams& endpoint_params) {
  RecoveryReport report;
  report.psi_cloud = reconstruct_range_psi(mu, cover, psi_params);
  if (report.psi_cloud.n() == 0) {
    report.inconclusive = true;
    return report;
  }
  apply_phi(report, report.psi_cloud, nullptr, endpoint_params);
  return report;
}

RecoveryReport recover_endpoint_oracle(const SamplePath& path, double gap_tol,
                                       const EndpointParams& endpoint_params) {
  RecoveryReport report;
  report.psi_cloud = cloud_from_path(path);
  const double radius = max_norm(report.psi_cloud);
  if (radius <= 0.0) {
    report.inconclusive = true;
    return report;
  }
  const double scale = radius * 1.02;
  // Cut sets in unit-ball units, scheduled against the rescaled geometry.
  SamplePath scaled_path = path;
  for (double& x : scaled_path.points) x /= scale;
  std::vector<PointCloud> cut_sets;
  try {
    cut_sets = oracle_cut_positions_by_delta(scaled_path, gap_tol / scale,
                                             endpoint_params.delta_schedule);
  } catch (const UnreliableInputError&) {
    report.inconclusive = true;
    return report;
  }
  std::vector<PointCloud> unscaled;
  unscaled.reserve(cut_sets.size());
  for (const PointCloud& cs : cut_sets) unscaled.push_back(scaled_cloud(cs, scale));
  apply_phi(report, report.psi_cloud, &unscaled, endpoint_params);
  return report;
}

void evaluate_against_truth(RecoveryReport& report, const PointCloud& truth_range,
                            const std::vector<double>& true_endpoint) {
  report.truth_diameter = directional_diameter(truth_range);
  if (report.psi_cloud.n() > 0 && truth_range.n() > 0) {
    report.hausdorff_to_truth = hausdorff_distance(report.psi_cloud, truth_range);
  }
  if (report.endpoint_estimate.has_value()) {
    report.endpoint_error =
        dist(report.endpoint_estimate->data(), true_endpoint.data(), truth_range.dim);
  }
}

ThickPointsResult thick_points_statistic(const PointCloud& planar,
                                         const std::vector<double>& radii) {
  if (planar.dim != 2) throw ConfigError("thick_points_statistic: planar input required");
  if (planar.n() < (1u << 16)) {
    throw ConfigError("thick_points_statistic: needs at least 2^16 samples");
  }
  if (radii.empty()) throw ConfigError("thick_points_statistic: empty radius schedule");
  ThickPointsResult out;
  const double n = static_cast<double>(planar.n());
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) {
      throw ConfigError("thick_points_statistic: radii must lie in (0, 1)");
    }
    const double s = r / 2.0;
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    counts.reserve(planar.n() * 2);
    for (std::size_t i = 0; i < planar.n(); ++i) {
      const double* p = planar.point(i);
      const auto ix_lo = static_cast<std::int64_t>(std::ceil((p[0] - r) / s));
      const auto ix_hi = static_cast<std::int64_t>(std::floor((p[0] + r) / s));
      const auto iy_lo = static_cast<std::int64_t>(std::ceil((p[1] - r) / s));
      const auto iy_hi = static_cast<std::int64_t>(std::floor((p[1] + r) / s));
      for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
        for (std::int64_t iy = iy_lo; iy <= iy_hi; ++iy) {
          const double dx = static_cast<double>(ix) * s - p[0];
          const double dy = static_cast<double>(iy) * s - p[1];
          if (dx * dx + dy * dy <= r * r) {
            const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix))
                                       << 32) |
                                      static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
            ++counts[key];
          }
        }
      }
    }
    std::uint32_t best = 0;
    for (const auto& [key, c] : counts) best = std::max(best, c);
    const double lg = std::log(r);
    const double ratio = (static_cast<double>(best) / n) / (r * r * lg * lg);
    out.profile.emplace_back(r, ratio);
    out.statistic = std::max(out.statistic, ratio);
  }
  return out;
}

}  // namespace occlab
