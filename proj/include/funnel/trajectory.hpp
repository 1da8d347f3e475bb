#pragma once

#include "funnel/common.hpp"
#include "funnel/control_grid.hpp"
#include "funnel/dynamics.hpp"
#include "funnel/schedule.hpp"
#include "funnel/sphere_net.hpp"

#include <functional>
#include <vector>

namespace funnel {

// Explicit first-order broken line: nodes z_{i+1} = z_i + dt * f(t_i, z_i, u_i),
// linear interpolation in between.
struct EulerPolyline {
  TimeGrid grid;
  std::vector<Vector> nodes;
  long word_index = -1;

  Vector at(double t) const;
};

// Dense reference trajectory from the fixed-step order-4 integrator.
struct SampledTrajectory {
  std::vector<double> times; // includes every grid node
  std::vector<Vector> states;
  long word_index = -1;
  int substeps = 1;

  Vector at(double t) const;
  double sup_norm() const;
};

EulerPolyline euler_broken_line(const DynamicsSpec& spec, const ProblemInstance& instance,
                                const DiscretizationPlan& plan, const SigmaNet& net,
                                const ControlWord& word, long word_index = -1);

// Classical RK4 with `substeps` fixed sub-intervals per grid interval; the
// control is constant on each interval so no event handling is needed.
SampledTrajectory integrate_trajectory(const DynamicsSpec& spec, const ProblemInstance& instance,
                                       const DiscretizationPlan& plan, const SigmaNet& net,
                                       const ControlWord& word, int substeps,
                                       long word_index = -1);

// Integrates an arbitrary piecewise-constant control (test utility and
// averaging experiments).
SampledTrajectory integrate_control(const DynamicsSpec& spec, const ProblemInstance& instance,
                                    const PiecewiseControl& control, int substeps);

// theta-endpoints at substeps s, 2s, 4s plus the Richardson ratio
// |x_s - x_2s| / |x_2s - x_4s| (about 16 for a smooth order-4 method).
struct ConvergenceProbe {
  Vector endpoint_s, endpoint_2s, endpoint_4s;
  double ratio = 0.0;
};

ConvergenceProbe convergence_probe(const DynamicsSpec& spec, const ProblemInstance& instance,
                                   const DiscretizationPlan& plan, const SigmaNet& net,
                                   const ControlWord& word, int substeps);

struct ModulusReport {
  double max_ratio = 0.0; // max ||x(t1)-x(t2)|| / phi(|t1-t2|)
  bool pass = false;
  double worst_t1 = 0.0, worst_t2 = 0.0;
  long pairs = 0;
};

// Checks ||x(t1)-x(t2)|| <= phi(|t1-t2|) on all pairs of a decimated sample
// grid (at most max_samples points).
ModulusReport modulus_check(const SampledTrajectory& traj,
                            const std::function<double(double)>& phi, int max_samples = 256);

} // namespace funnel
