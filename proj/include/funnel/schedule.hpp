#pragma once

#include "funnel/common.hpp"
#include "funnel/constants.hpp"
#include "funnel/dynamics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace funnel {

// Uniform partition of [t0, theta]. node(steps) is theta bit-exactly so that
// downstream artifacts share the same node doubles.
struct TimeGrid {
  double t0 = 0.0;
  double theta = 1.0;
  int steps = 1;

  double dt() const { return (theta - t0) / steps; }
  double node(int i) const { return i == steps ? theta : t0 + i * dt(); }
  std::vector<double> nodes() const;
  // Largest i with node(i) <= t (clamped to steps-1 for interpolation).
  int interval_of(double t) const;
};

struct Caps {
  long max_words = 10'000'000;
  long max_net_points = 1'000'000;
  int max_time_steps = 1'000'000;
  int max_magnitude_steps = 1'000'000;
};

// The full discretization: time grid (N), magnitude grid on [0, beta] (q),
// sphere-net mesh sigma, plus the instance data the budget check needs.
struct DiscretizationPlan {
  double t0 = 0.0;
  double theta = 1.0;
  double p = 2.0;
  double r = 1.0;

  double beta = 1.0;
  int time_steps = 1;      // N, dt = (theta-t0)/N
  int magnitude_steps = 1; // q, magnitude step = beta/q
  double sigma = 1.0;
  double lip_radius = 1.0; // R*, user-supplied schedule input
  std::optional<double> epsilon;

  TimeGrid grid() const { return {t0, theta, time_steps}; }
  double dt() const { return grid().dt(); }
  double magnitude_step() const { return beta / magnitude_steps; }
  // j-th magnitude level; level(q) is beta bit-exactly.
  double magnitude_level(int j) const {
    return j == magnitude_steps ? beta : j * magnitude_step();
  }

  static DiscretizationPlan direct(const ProblemInstance& instance, double beta, int time_steps,
                                   int magnitude_steps, double sigma, double lip_radius = 1.0);
  void validate() const;
};

// Options for the empirical modulus-of-continuity scan.
struct OmegaOptions {
  int grid_density = 64;        // anchor points per axis (t, each x, each u)
  int ladder = 64;              // absolute displacement rungs up to the reference scale
  long max_evals = 100'000'000; // anchors are thinned to keep within this budget
};

// Empirical estimate of
//   omega(radius, beta) = max ||f(t1,x1,u) - f(t2,x2,u)||
// over |t1-t2| <= radius, ||x1-x2|| <= radius, states in the alpha ball,
// controls in the beta ball, times in [t0, theta]. Deterministic grid scan:
// anchors on a tensor grid, displacements on a fixed absolute ladder plus the
// exact radius endpoint.
double estimate_omega(const DynamicsSpec& spec, const ProblemInstance& instance, double alpha,
                      double beta, double radius, const OmegaOptions& options = {});

// Optional analytic override for the modulus: (radius, beta) -> omega.
using OmegaFn = std::function<double(double radius, double beta)>;

// Derives the eps-driven plan: beta = beta*(eps), q from delta*(eps),
// sigma = sigma*(eps, beta), and N from the smallest of Delta*(eps), the
// omega threshold, and eps/10. Throws CapacityError when N or q would exceed
// the caps (the message reports the required values).
DiscretizationPlan epsilon_schedule(const DynamicsSpec& spec, const ConstantsChain& chain,
                                    const ProblemInstance& instance, double eps, double lip_radius,
                                    const Caps& caps = {}, const OmegaOptions& omega_options = {},
                                    const OmegaFn& omega_override = nullptr);

} // namespace funnel
