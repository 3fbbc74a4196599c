#pragma once

// Range and endpoint recovery from the projected occupation measure: radial
// estimates rho from thick sub-cap masses, range reconstruction as the limsup
// of rescaled cover centers, endpoint extraction through the cut structure,
// and the planar thick-point statistic.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "occlab/cover.hpp"
#include "occlab/occupation.hpp"
#include "occlab/set_topology.hpp"

namespace occlab {

struct RhoParams {
  std::vector<double> radii;  // decreasing, within (r_min, cap.radius]
  double kappa_highd = 1.0;   // denominator constant for dim > 3
};

struct RhoEstimate {
  Cap cap;
  double value = 0.0;
  std::vector<std::pair<double, double>> profile;  // (r, max ratio), r decreasing
};

// Minimal reliable sub-cap radius for a measure with n equal-weight atoms:
// below ~4 steps' worth of spread, cap masses are single-atom noise.
double rho_r_min(const OccupationMeasure& mu);

// Maximizes mu(D') / (2 r^2 log^2 r) over sub-caps D' of radius r centered at
// cover points of the matching level, over the radius schedule; value is the
// square root of the best ratio. dim > 3 uses kappa * r^2 |log r| instead.
RhoEstimate rho_estimate(const OccupationMeasure& mu, const Cap& cap,
                         const CoverHierarchy& cover, const RhoParams& params);

struct PsiParams {
  std::vector<int> j_range;   // cover levels whose caps seed A_j
  double limsup_tol = 0.15;   // tail-intersection tolerance, absolute units
  double kappa_highd = 1.0;
};

// A_j clouds {rho_D * Cen(D) : D in C_j} for each j in j_range.
std::vector<PointCloud> radial_level_sets(const OccupationMeasure& mu,
                                          const CoverHierarchy& cover, const PsiParams& params);

// Tail-intersection of the A_j across j_range: the range estimate.
PointCloud reconstruct_range_psi(const OccupationMeasure& mu, const CoverHierarchy& cover,
                                 const PsiParams& params);

struct EndpointParams {
  std::vector<double> delta_schedule;  // decreasing, unit-ball units
  int phi_level = 3;                   // lattice level for the cut machinery
};

struct RecoveryReport {
  PointCloud psi_cloud;
  std::optional<std::vector<double>> endpoint_estimate;
  bool inconclusive = false;
  std::size_t n_candidates = 0;
  double scale = 0.0;  // rescaling factor applied before the cut machinery
  // Filled by evaluate_against_truth:
  double hausdorff_to_truth = -1.0;
  double endpoint_error = -1.0;
  double truth_diameter = 0.0;
};

RecoveryReport recover_endpoint(const OccupationMeasure& mu, const CoverHierarchy& cover,
                                const PsiParams& psi_params,
                                const EndpointParams& endpoint_params);

// Ablation: range and cut structure taken from the path itself (dropping the
// rho estimation stage), endpoint still extracted by the same candidate
// machinery.
RecoveryReport recover_endpoint_oracle(const SamplePath& path, double gap_tol,
                                       const EndpointParams& endpoint_params);

void evaluate_against_truth(RecoveryReport& report, const PointCloud& truth_range,
                            const std::vector<double>& true_endpoint);

struct ThickPointsResult {
  double statistic = 0.0;
  std::vector<std::pair<double, double>> profile;  // (r, sup ratio)
};

// sup over planar lattice balls (spacing r/2) of mass(D) / (r^2 log^2 r).
ThickPointsResult thick_points_statistic(const PointCloud& planar,
                                         const std::vector<double>& radii);

}  // namespace occlab
