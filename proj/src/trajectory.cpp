#include "funnel/trajectory.hpp"

#include "funnel/constants.hpp"

#include <algorithm>
#include <cmath>

namespace funnel {

namespace {

// States past 1000*(alpha*+1) signal a system violating its declared growth
// bound (or an unstable Euler step); abort instead of overflowing.
double blowup_threshold(const DynamicsSpec& spec, const ProblemInstance& instance) {
  return 1e3 * (trajectory_bound(spec, instance) + 1.0);
}

void guard_state(const Vector& state, double threshold, double t, long word_index, int step) {
  double norm = state.norm();
  if (!(norm <= threshold))
    throw DivergenceError("trajectory diverged at step " + std::to_string(step) + " (t=" +
                          format_double(t) + ", |z|=" + format_double(norm) + ", word " +
                          std::to_string(word_index) + ")");
}

Vector interpolate(const std::vector<double>& times, const std::vector<Vector>& states, double t) {
  if (t < times.front() || t > times.back())
    throw ValidationError("time " + format_double(t) + " outside horizon");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - times.begin()),
                                         times.size() - 1);
  std::size_t lo = hi - 1;
  if (t == times[lo]) return states[lo];
  double lambda = (t - times[lo]) / (times[hi] - times[lo]);
  return states[lo] + lambda * (states[hi] - states[lo]);
}

} // namespace

Vector EulerPolyline::at(double t) const {
  int i = grid.interval_of(t);
  double lo = grid.node(i), hi = grid.node(i + 1);
  if (t == lo) return nodes[static_cast<std::size_t>(i)];
  double lambda = (t - lo) / (hi - lo);
  return nodes[static_cast<std::size_t>(i)] +
         lambda * (nodes[static_cast<std::size_t>(i) + 1] - nodes[static_cast<std::size_t>(i)]);
}

Vector SampledTrajectory::at(double t) const { return interpolate(times, states, t); }

double SampledTrajectory::sup_norm() const {
  double best = 0.0;
  for (const Vector& s : states) best = std::max(best, s.norm());
  return best;
}

EulerPolyline euler_broken_line(const DynamicsSpec& spec, const ProblemInstance& instance,
                                const DiscretizationPlan& plan, const SigmaNet& net,
                                const ControlWord& word, long word_index) {
  spec.validate();
  instance.validate(spec.n);
  const double threshold = blowup_threshold(spec, instance);
  const TimeGrid grid = plan.grid();
  const double dt = grid.dt();

  EulerPolyline line;
  line.grid = grid;
  line.word_index = word_index;
  line.nodes.reserve(static_cast<std::size_t>(plan.time_steps) + 1);
  line.nodes.push_back(instance.x0);

  Vector f(spec.n);
  for (int i = 0; i < plan.time_steps; ++i) {
    const Vector u = word_value(word, plan, net, i);
    const Vector& z = line.nodes.back();
    spec.rhs(grid.node(i), z, u, f);
    line.nodes.push_back(z + dt * f);
    guard_state(line.nodes.back(), threshold, grid.node(i + 1), word_index, i + 1);
  }
  return line;
}

namespace {

// One classical RK4 step with frozen control.
void rk4_step(const DynamicsSpec& spec, double t, double h, const Vector& u, Vector& x, Vector& k1,
              Vector& k2, Vector& k3, Vector& k4, Vector& tmp) {
  spec.rhs(t, x, u, k1);
  tmp = x + (0.5 * h) * k1;
  spec.rhs(t + 0.5 * h, tmp, u, k2);
  tmp = x + (0.5 * h) * k2;
  spec.rhs(t + 0.5 * h, tmp, u, k3);
  tmp = x + h * k3;
  spec.rhs(t + h, tmp, u, k4);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SampledTrajectory integrate_piecewise(const DynamicsSpec& spec, const ProblemInstance& instance,
                                      const TimeGrid& grid,
                                      const std::function<Vector(int)>& control_on, int substeps,
                                      long word_index) {
  if (substeps < 1) throw ValidationError("integrate: substeps must be >= 1");
  const double threshold = blowup_threshold(spec, instance);

  SampledTrajectory traj;
  traj.word_index = word_index;
  traj.substeps = substeps;
  traj.times.reserve(static_cast<std::size_t>(grid.steps) * substeps + 1);
  traj.states.reserve(traj.times.capacity());
  traj.times.push_back(grid.node(0));
  traj.states.push_back(instance.x0);

  Vector x = instance.x0;
  Vector k1(spec.n), k2(spec.n), k3(spec.n), k4(spec.n), tmp(spec.n);
  for (int i = 0; i < grid.steps; ++i) {
    const Vector u = control_on(i);
    const double lo = grid.node(i), hi = grid.node(i + 1);
    const double h = (hi - lo) / substeps;
    for (int k = 0; k < substeps; ++k) {
      rk4_step(spec, lo + k * h, h, u, x, k1, k2, k3, k4, tmp);
      const double t_next = (k == substeps - 1) ? hi : lo + (k + 1) * h;
      guard_state(x, threshold, t_next, word_index, i * substeps + k + 1);
      traj.times.push_back(t_next);
      traj.states.push_back(x);
    }
  }
  return traj;
}

} // namespace

SampledTrajectory integrate_trajectory(const DynamicsSpec& spec, const ProblemInstance& instance,
                                       const DiscretizationPlan& plan, const SigmaNet& net,
                                       const ControlWord& word, int substeps, long word_index) {
  spec.validate();
  instance.validate(spec.n);
  return integrate_piecewise(
      spec, instance, plan.grid(),
      [&](int i) { return word_value(word, plan, net, i); }, substeps, word_index);
}

SampledTrajectory integrate_control(const DynamicsSpec& spec, const ProblemInstance& instance,
                                    const PiecewiseControl& control, int substeps) {
  spec.validate();
  instance.validate(spec.n);
  return integrate_piecewise(
      spec, instance, control.grid,
      [&](int i) { return control.values[static_cast<std::size_t>(i)]; }, substeps, -1);
}

ConvergenceProbe convergence_probe(const DynamicsSpec& spec, const ProblemInstance& instance,
                                   const DiscretizationPlan& plan, const SigmaNet& net,
                                   const ControlWord& word, int substeps) {
  ConvergenceProbe probe;
  probe.endpoint_s = integrate_trajectory(spec, instance, plan, net, word, substeps).states.back();
  probe.endpoint_2s =
      integrate_trajectory(spec, instance, plan, net, word, 2 * substeps).states.back();
  probe.endpoint_4s =
      integrate_trajectory(spec, instance, plan, net, word, 4 * substeps).states.back();
  double coarse = (probe.endpoint_s - probe.endpoint_2s).norm();
  double fine = (probe.endpoint_2s - probe.endpoint_4s).norm();
  probe.ratio = fine > 0 ? coarse / fine : 0.0;
  return probe;
}

ModulusReport modulus_check(const SampledTrajectory& traj,
                            const std::function<double(double)>& phi, int max_samples) {
  if (max_samples < 2) throw ValidationError("modulus_check: need at least 2 samples");
  const std::size_t count = traj.times.size();
  const std::size_t stride = std::max<std::size_t>(1, count / static_cast<std::size_t>(max_samples));

  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < count; i += stride) picks.push_back(i);
  if (picks.back() != count - 1) picks.push_back(count - 1);

  ModulusReport report;
  for (std::size_t a = 0; a < picks.size(); ++a) {
    for (std::size_t b = a + 1; b < picks.size(); ++b) {
      double gap = std::abs(traj.times[picks[b]] - traj.times[picks[a]]);
      if (gap == 0.0) continue;
      double bound = phi(gap);
      double dist = (traj.states[picks[b]] - traj.states[picks[a]]).norm();
      double ratio = bound > 0 ? dist / bound : (dist > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      ++report.pairs;
      if (ratio > report.max_ratio) {
        report.max_ratio = ratio;
        report.worst_t1 = traj.times[picks[a]];
        report.worst_t2 = traj.times[picks[b]];
      }
    }
  }
  report.pass = report.max_ratio <= 1.0 + 1e-12;
  return report;
}

} // namespace funnel
