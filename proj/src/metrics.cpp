#include "funnel/metrics.hpp"

#include "funnel/control_grid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace funnel {

namespace {

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  long index = -1;
};

Nearest nearest_brute(const Vector& query, const std::vector<Vector>& cloud) {
  Nearest best;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double d = (query - cloud[i]).norm();
    if (d < best.distance) {
      best.distance = d;
      best.index = static_cast<long>(i);
    }
  }
  return best;
}

// Uniform cell index with exact nearest-neighbor queries: shells of cells are
// scanned outward until the next shell cannot beat the incumbent.
class CellIndex {
public:
  explicit CellIndex(const std::vector<Vector>& cloud) : cloud_(cloud) {
    dim_ = static_cast<int>(cloud.front().size());
    lo_ = cloud.front();
    Vector hi = cloud.front();
    for (const Vector& p : cloud) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    double extent = (hi - lo_).maxCoeff();
    double cells_per_axis =
        std::max(1.0, std::floor(std::pow(static_cast<double>(cloud.size()), 1.0 / dim_)));
    cell_ = extent > 0 ? extent / cells_per_axis : 1.0;
    dims_.resize(static_cast<std::size_t>(dim_));
    strides_.resize(static_cast<std::size_t>(dim_));
    long stride = 1;
    for (int k = 0; k < dim_; ++k) {
      dims_[static_cast<std::size_t>(k)] =
          std::max<long>(1, static_cast<long>(std::floor((hi[k] - lo_[k]) / cell_)) + 1);
      strides_[static_cast<std::size_t>(k)] = stride;
      stride *= dims_[static_cast<std::size_t>(k)];
    }
    buckets_.resize(static_cast<std::size_t>(stride));
    for (std::size_t i = 0; i < cloud.size(); ++i)
      buckets_[static_cast<std::size_t>(cell_of(cloud[i]))].push_back(static_cast<long>(i));
  }

  Nearest nearest(const Vector& query) const {
    std::vector<long> coords(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k)
      coords[static_cast<std::size_t>(k)] =
          std::clamp<long>(static_cast<long>(std::floor((query[k] - lo_[k]) / cell_)), 0,
                           dims_[static_cast<std::size_t>(k)] - 1);
    Nearest best;
    long max_ring = 0;
    for (int k = 0; k < dim_; ++k)
      max_ring = std::max(max_ring, std::max(coords[static_cast<std::size_t>(k)],
                                             dims_[static_cast<std::size_t>(k)] - 1 -
                                                 coords[static_cast<std::size_t>(k)]));
    for (long ring = 0; ring <= max_ring; ++ring) {
      // Rings 0..ring-1 are done; any point in an unscanned cell differs by
      // at least ring cells on some axis, so it is >= (ring-1)*cell_ away.
      if (ring > 1 && best.distance <= static_cast<double>(ring - 1) * cell_) break;
      scan_ring(query, coords, ring, best);
    }
    return best;
  }

private:
  long cell_of(const Vector& p) const {
    long index = 0;
    for (int k = 0; k < dim_; ++k) {
      long c = std::clamp<long>(static_cast<long>(std::floor((p[k] - lo_[k]) / cell_)), 0,
                                dims_[static_cast<std::size_t>(k)] - 1);
      index += c * strides_[static_cast<std::size_t>(k)];
    }
    return index;
  }

  void scan_ring(const Vector& query, const std::vector<long>& center, long ring,
                 Nearest& best) const {
    std::vector<long> offset(static_cast<std::size_t>(dim_), -ring);
    while (true) {
      bool on_ring = ring == 0;
      for (int k = 0; k < dim_ && !on_ring; ++k)
        if (std::abs(offset[static_cast<std::size_t>(k)]) == ring) on_ring = true;
      if (on_ring) {
        bool inside = true;
        long index = 0;
        for (int k = 0; k < dim_; ++k) {
          long c = center[static_cast<std::size_t>(k)] + offset[static_cast<std::size_t>(k)];
          if (c < 0 || c >= dims_[static_cast<std::size_t>(k)]) {
            inside = false;
            break;
          }
          index += c * strides_[static_cast<std::size_t>(k)];
        }
        if (inside) {
          for (long i : buckets_[static_cast<std::size_t>(index)]) {
            double d = (query - cloud_[static_cast<std::size_t>(i)]).norm();
            if (d < best.distance) {
              best.distance = d;
              best.index = i;
            }
          }
        }
      }
      int axis = dim_ - 1;
      while (axis >= 0) {
        if (++offset[static_cast<std::size_t>(axis)] <= ring) break;
        offset[static_cast<std::size_t>(axis)] = -ring;
        --axis;
      }
      if (axis < 0) break;
    }
  }

  const std::vector<Vector>& cloud_;
  int dim_ = 0;
  Vector lo_;
  double cell_ = 1.0;
  std::vector<long> dims_;
  std::vector<long> strides_;
  std::vector<std::vector<long>> buckets_;
};

struct Directed {
  double value = 0.0;
  long from = -1, to = -1;
};

Directed directed_points(const std::vector<Vector>& a, const std::vector<Vector>& b,
                         bool accelerate) {
  Directed out;
  std::optional<CellIndex> index;
  if (accelerate) index.emplace(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Nearest near = accelerate ? index->nearest(a[i]) : nearest_brute(a[i], b);
    if (near.distance > out.value || out.from < 0) {
      out.value = near.distance;
      out.from = static_cast<long>(i);
      out.to = near.index;
    }
  }
  return out;
}

} // namespace

DistanceReport hausdorff_points(const std::vector<Vector>& a, const std::vector<Vector>& b,
                                std::optional<bool> accelerate) {
  if (a.empty() || b.empty()) throw ValidationError("hausdorff: point sets must be nonempty");
  if (a.front().size() != b.front().size())
    throw ValidationError("hausdorff: mismatched point dimensions");
  const int dim = static_cast<int>(a.front().size());
  bool use_grid = accelerate.value_or(dim <= 4 && a.size() * b.size() > 16384);

  Directed ab = directed_points(a, b, use_grid);
  Directed ba = directed_points(b, a, use_grid);
  DistanceReport report;
  report.directed_ab = ab.value;
  report.directed_ba = ba.value;
  report.hausdorff = std::max(ab.value, ba.value);
  report.witness_ab_from = ab.from;
  report.witness_ab_to = ab.to;
  report.witness_ba_from = ba.from;
  report.witness_ba_to = ba.to;
  return report;
}

std::vector<double> default_eval_grid(const std::vector<TimeGrid>& grids) {
  std::set<double> times;
  for (const TimeGrid& grid : grids) {
    for (int i = 0; i <= grid.steps; ++i) {
      times.insert(grid.node(i));
      if (i < grid.steps) times.insert(grid.node(i) + 0.5 * grid.dt());
    }
  }
  return {times.begin(), times.end()};
}

namespace {

// Per-member evaluation matrix: row i holds member i at every grid time.
Matrix evaluate_bundle(const TrajectoryBundle& bundle, const std::vector<double>& grid, int n) {
  Matrix values(bundle.size(), static_cast<Eigen::Index>(grid.size()) * n);
  for (std::size_t i = 0; i < bundle.size(); ++i)
    for (std::size_t k = 0; k < grid.size(); ++k)
      values.row(static_cast<Eigen::Index>(i))
          .segment(static_cast<Eigen::Index>(k) * n, n) = bundle.member_at(i, grid[k]).transpose();
  return values;
}

double pair_sup_distance(const Matrix& a, const Matrix& b, Eigen::Index ia, Eigen::Index ib, int n,
                         std::size_t grid_size, double early_exit_at) {
  double sup = 0.0;
  for (std::size_t k = 0; k < grid_size; ++k) {
    double d = (a.row(ia).segment(static_cast<Eigen::Index>(k) * n, n) -
                b.row(ib).segment(static_cast<Eigen::Index>(k) * n, n))
                   .norm();
    if (d > sup) {
      sup = d;
      if (sup >= early_exit_at) return sup;
    }
  }
  return sup;
}

Directed directed_bundle(const Matrix& a, const Matrix& b, int n, std::size_t grid_size) {
  Directed out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    long best_j = -1;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double d = pair_sup_distance(a, b, i, j, n, grid_size, best);
      if (d < best) {
        best = d;
        best_j = static_cast<long>(j);
      }
    }
    if (best > out.value || out.from < 0) {
      out.value = best;
      out.from = static_cast<long>(i);
      out.to = best_j;
    }
  }
  return out;
}

void require_contains_nodes(const std::vector<double>& grid, const TimeGrid& nodes) {
  for (int i = 0; i <= nodes.steps; ++i)
    if (!std::binary_search(grid.begin(), grid.end(), nodes.node(i)))
      throw ValidationError("eval grid must contain every bundle grid node");
}

} // namespace

DistanceReport hausdorff_uniform(const TrajectoryBundle& a, const TrajectoryBundle& b,
                                 const std::vector<double>& eval_grid) {
  if (a.size() == 0 || b.size() == 0) throw ValidationError("hausdorff: empty bundle");
  if (a.plan.t0 != b.plan.t0 || a.plan.theta != b.plan.theta)
    throw ValidationError("hausdorff: bundles disagree on the horizon");
  if (eval_grid.size() < 2 || !std::is_sorted(eval_grid.begin(), eval_grid.end()))
    throw ValidationError("hausdorff: eval grid must be sorted with at least two times");
  require_contains_nodes(eval_grid, a.plan.grid());
  require_contains_nodes(eval_grid, b.plan.grid());

  const int n = static_cast<int>(a.member_at(0, eval_grid.front()).size());
  Matrix ma = evaluate_bundle(a, eval_grid, n);
  Matrix mb = evaluate_bundle(b, eval_grid, n);

  Directed ab = directed_bundle(ma, mb, n, eval_grid.size());
  Directed ba = directed_bundle(mb, ma, n, eval_grid.size());
  DistanceReport report;
  report.directed_ab = ab.value;
  report.directed_ba = ba.value;
  report.hausdorff = std::max(ab.value, ba.value);
  report.witness_ab_from = ab.from;
  report.witness_ab_to = ab.to;
  report.witness_ba_from = ba.from;
  report.witness_ba_to = ba.to;
  report.eval_grid = std::to_string(eval_grid.size()) + " times in [" +
                     format_double(eval_grid.front()) + ", " + format_double(eval_grid.back()) + "]";
  return report;
}

DistanceReport hausdorff_funnel(const FunnelCloud& a, const FunnelCloud& b, double time_scale) {
  if (a.total_points() == 0 || b.total_points() == 0)
    throw ValidationError("hausdorff: empty funnel cloud");
  DistanceReport report = hausdorff_points(a.flatten(time_scale), b.flatten(time_scale));
  report.eval_grid = "funnel points in R^" + std::to_string(a.state_dim + 1);
  return report;
}

namespace {

void require_refining(const std::vector<DiscretizationPlan>& plans) {
  if (plans.empty()) throw ValidationError("study: need at least one plan");
  for (std::size_t k = 1; k < plans.size(); ++k) {
    const auto& prev = plans[k - 1];
    const auto& cur = plans[k];
    if (cur.t0 != prev.t0 || cur.theta != prev.theta || cur.p != prev.p || cur.r != prev.r)
      throw ValidationError("study: plans must share the instance");
    if (cur.beta != prev.beta) throw ValidationError("study: plans must share beta");
    if (cur.time_steps % prev.time_steps != 0 || cur.time_steps < prev.time_steps)
      throw ValidationError("study: time grids must be nested");
    if (cur.magnitude_steps % prev.magnitude_steps != 0 ||
        cur.magnitude_steps < prev.magnitude_steps)
      throw ValidationError("study: magnitude grids must be nested");
    if (cur.sigma > prev.sigma) throw ValidationError("study: sigma must not increase");
  }
}

} // namespace

std::vector<StudyRow> convergence_study(const DynamicsSpec& spec, const ProblemInstance& instance,
                                        const std::vector<DiscretizationPlan>& plans,
                                        const StudyOptions& options) {
  require_refining(plans);
  const ConstantsChain chain = derive_constants(spec, instance);

  // Finest-plan oracle bundle is the fixed reference for every row.
  const DiscretizationPlan& finest = plans.back();
  const SigmaNet finest_net = build_sigma_net(spec.m, finest.sigma, options.caps.max_net_points);
  const TrajectoryBundle reference = build_bundle(spec, instance, finest, finest_net,
                                                  BundleMode::oracle, options.caps, options.substeps);
  const std::vector<Vector> reference_slice =
      options.reference_slice.empty() ? attainable_slice(reference, instance.theta, options.dedup_tol)
                                      : options.reference_slice;

  std::vector<TimeGrid> grids;
  for (const auto& plan : plans) grids.push_back(plan.grid());
  const std::vector<double> eval_grid = default_eval_grid(grids);

  std::vector<StudyRow> rows;
  for (const auto& plan : plans) {
    StudyRow row;
    row.plan = plan;
    const auto start = std::chrono::steady_clock::now();
    try {
      const SigmaNet net = build_sigma_net(spec.m, plan.sigma, options.caps.max_net_points);
      row.words = count_words(plan, net, options.caps.max_words);
      const TrajectoryBundle bundle =
          build_bundle(spec, instance, plan, net, BundleMode::euler, options.caps);

      DistanceReport hc = hausdorff_uniform(reference, bundle, eval_grid);
      row.h_c = hc.hausdorff;
      row.ref_to_bundle = hc.directed_ab;

      DistanceReport slice =
          hausdorff_points(reference_slice, attainable_slice(bundle, instance.theta, options.dedup_tol));
      row.slice_hn = slice.hausdorff;
      row.ref_to_slice = slice.directed_ab;

      // The reference funnel is sampled on the row's own time grid so the
      // column isolates state error (a fixed finer grid would floor the
      // distance at half the coarse time step).
      DistanceReport fun = hausdorff_funnel(build_funnel(reference, plan.grid(), options.dedup_tol),
                                            build_funnel(bundle, options.dedup_tol));
      row.funnel_hn1 = fun.hausdorff;
      row.ref_to_funnel = fun.directed_ab;

      row.omega = estimate_omega(spec, instance, chain.trajectory_bound, plan.beta,
                                 chain.step_modulus(plan.dt()), options.omega_options);
      row.euler_gap_bound = row.omega * chain.horizon *
                            std::exp(chain.lipschitz_gain(plan.beta) * chain.horizon);
    } catch (const CapacityError& err) {
      row.error = err.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace funnel
