#pragma once

#include "funnel/bundle.hpp"
#include "funnel/common.hpp"
#include "funnel/constants.hpp"

#include <optional>
#include <string>
#include <vector>

namespace funnel {

struct DistanceReport {
  double directed_ab = 0.0; // sup over A of dist to B
  double directed_ba = 0.0;
  double hausdorff = 0.0;
  // Witnesses: the a maximizing dist(a, B) and its nearest b (and vice versa).
  long witness_ab_from = -1, witness_ab_to = -1;
  long witness_ba_from = -1, witness_ba_to = -1;
  std::string eval_grid;
};

// Exact max-min over pairs. `accelerate` routes the nearest-neighbor queries
// through a uniform cell index with identical results (used automatically for
// large low-dimensional inputs; forced on/off for testing).
DistanceReport hausdorff_points(const std::vector<Vector>& a, const std::vector<Vector>& b,
                                std::optional<bool> accelerate = std::nullopt);

// Hausdorff distance between bundles where trajectories are compared in the
// sup norm sampled on eval_grid. The grid must contain every grid node of
// both bundles; for pairs of broken lines on a shared grid the node values
// are exact (the pointwise distance is convex on each interval).
DistanceReport hausdorff_uniform(const TrajectoryBundle& a, const TrajectoryBundle& b,
                                 const std::vector<double>& eval_grid);

// Union of grid nodes and interval midpoints of every listed grid.
std::vector<double> default_eval_grid(const std::vector<TimeGrid>& grids);

// Hausdorff distance between funnel clouds as point sets in R^{n+1}; the time
// coordinate enters the Euclidean norm scaled by time_scale (default 1).
DistanceReport hausdorff_funnel(const FunnelCloud& a, const FunnelCloud& b,
                                double time_scale = 1.0);

struct StudyRow {
  DiscretizationPlan plan;
  long words = 0;
  double h_c = 0.0, ref_to_bundle = 0.0;
  double slice_hn = 0.0, ref_to_slice = 0.0;
  double funnel_hn1 = 0.0, ref_to_funnel = 0.0;
  double omega = 0.0, euler_gap_bound = 0.0;
  double wall_seconds = 0.0;
  std::string error; // nonempty when the row hit a capacity limit
};

struct StudyOptions {
  int substeps = 16;
  // Reference set for the theta-slice columns; defaults to the oracle
  // bundle's own theta slice.
  std::vector<Vector> reference_slice;
  Caps caps;
  OmegaOptions omega_options;
  double dedup_tol = 1e-9;
};

// Runs each plan against a fixed reference (the oracle bundle of the finest
// plan). Plans must refine: time and magnitude grids nested, sigma
// nonincreasing. Capacity errors mark the row and the study continues.
std::vector<StudyRow> convergence_study(const DynamicsSpec& spec, const ProblemInstance& instance,
                                        const std::vector<DiscretizationPlan>& plans,
                                        const StudyOptions& options = {});

} // namespace funnel
