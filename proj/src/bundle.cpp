#include "funnel/bundle.hpp"

#include <chrono>

namespace funnel {

TrajectoryBundle build_bundle(const DynamicsSpec& spec, const ProblemInstance& instance,
                              const DiscretizationPlan& plan, const SigmaNet& net, BundleMode mode,
                              const Caps& caps, int substeps) {
  plan.validate();
  if (net.dim != spec.m)
    throw ValidationError("bundle: net dimension " + std::to_string(net.dim) +
                          " does not match control dimension " + std::to_string(spec.m));
  const auto start = std::chrono::steady_clock::now();

  TrajectoryBundle bundle;
  bundle.plan = plan;
  bundle.mode = mode;
  try {
    for_each_word(plan, net, caps.max_words, [&](long index, const ControlWord& word) {
      if (mode == BundleMode::euler)
        bundle.lines.push_back(euler_broken_line(spec, instance, plan, net, word, index));
      else
        bundle.samples.push_back(
            integrate_trajectory(spec, instance, plan, net, word, substeps, index));
    });
  } catch (const DivergenceError&) {
    throw; // word index is already in the message
  }
  bundle.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return bundle;
}

std::vector<Vector> dedup_points(const std::vector<Vector>& points, double tol) {
  std::vector<Vector> kept;
  kept.reserve(points.size());
  for (const Vector& p : points) {
    bool fresh = true;
    for (const Vector& k : kept) {
      if ((p - k).lpNorm<Eigen::Infinity>() < tol) {
        fresh = false;
        break;
      }
    }
    if (fresh) kept.push_back(p);
  }
  return kept;
}

std::vector<Vector> attainable_slice(const TrajectoryBundle& bundle, double t, double dedup_tol) {
  if (bundle.size() == 0) throw ValidationError("slice of an empty bundle");
  std::vector<Vector> raw;
  raw.reserve(bundle.size());
  for (std::size_t i = 0; i < bundle.size(); ++i) raw.push_back(bundle.member_at(i, t));
  return dedup_points(raw, dedup_tol);
}

long FunnelCloud::total_points() const {
  long total = 0;
  for (const auto& slice : slices) total += static_cast<long>(slice.size());
  return total;
}

std::vector<Vector> FunnelCloud::flatten(double time_scale) const {
  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(total_points()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (const Vector& x : slices[i]) {
      Vector row(state_dim + 1);
      row[0] = time_scale * times[i];
      row.tail(state_dim) = x;
      rows.push_back(row);
    }
  }
  return rows;
}

FunnelCloud build_funnel(const TrajectoryBundle& bundle, double dedup_tol) {
  return build_funnel(bundle, bundle.plan.grid(), dedup_tol);
}

FunnelCloud build_funnel(const TrajectoryBundle& bundle, const TimeGrid& grid, double dedup_tol) {
  if (bundle.size() == 0) throw ValidationError("funnel of an empty bundle");
  const TimeGrid own = bundle.plan.grid();
  const bool native = bundle.mode == BundleMode::euler && grid.t0 == own.t0 &&
                      grid.theta == own.theta && grid.steps == own.steps;

  FunnelCloud cloud;
  cloud.state_dim = static_cast<int>(bundle.member_at(0, grid.node(0)).size());
  cloud.times = grid.nodes();
  cloud.slices.reserve(cloud.times.size());
  for (int i = 0; i <= grid.steps; ++i) {
    std::vector<Vector> raw;
    raw.reserve(bundle.size());
    if (native) {
      for (const EulerPolyline& line : bundle.lines)
        raw.push_back(line.nodes[static_cast<std::size_t>(i)]);
    } else {
      for (std::size_t k = 0; k < bundle.size(); ++k)
        raw.push_back(bundle.member_at(k, grid.node(i)));
    }
    cloud.slices.push_back(dedup_points(raw, dedup_tol));
  }
  return cloud;
}

} // namespace funnel
