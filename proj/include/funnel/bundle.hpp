#pragma once

#include "funnel/common.hpp"
#include "funnel/trajectory.hpp"

#include <vector>

namespace funnel {

enum class BundleMode { euler, oracle };

// All trajectories of one plan, one entry per enumerated word in enumeration
// order. Euler mode holds broken lines, oracle mode RK4 samplings.
struct TrajectoryBundle {
  DiscretizationPlan plan;
  BundleMode mode = BundleMode::euler;
  std::vector<EulerPolyline> lines;
  std::vector<SampledTrajectory> samples;
  double build_seconds = 0.0;

  std::size_t size() const {
    return mode == BundleMode::euler ? lines.size() : samples.size();
  }
  Vector member_at(std::size_t index, double t) const {
    return mode == BundleMode::euler ? lines[index].at(t) : samples[index].at(t);
  }
};

TrajectoryBundle build_bundle(const DynamicsSpec& spec, const ProblemInstance& instance,
                              const DiscretizationPlan& plan, const SigmaNet& net, BundleMode mode,
                              const Caps& caps = {}, int substeps = 32);

// States reached at time t, deduplicated: points closer than dedup_tol in the
// max norm collapse onto the first representative (enumeration order).
std::vector<Vector> attainable_slice(const TrajectoryBundle& bundle, double t,
                                     double dedup_tol = 1e-9);

// Space-time point cloud: for every grid node t_i the deduplicated slice of
// the bundle, with t-coordinates bit-equal to the grid nodes.
struct FunnelCloud {
  int state_dim = 0;
  std::vector<double> times;
  std::vector<std::vector<Vector>> slices;

  long total_points() const;
  // Flattened (t, x) rows in R^{n+1}.
  std::vector<Vector> flatten(double time_scale = 1.0) const;
};

FunnelCloud build_funnel(const TrajectoryBundle& bundle, double dedup_tol = 1e-9);

// Funnel of the bundle sampled on an explicit grid (e.g. a coarser plan's
// nodes when comparing against a reference bundle).
FunnelCloud build_funnel(const TrajectoryBundle& bundle, const TimeGrid& grid,
                         double dedup_tol = 1e-9);

std::vector<Vector> dedup_points(const std::vector<Vector>& points, double tol);

} // namespace funnel
