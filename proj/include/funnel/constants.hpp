#pragma once

#include "funnel/common.hpp"
#include "funnel/dynamics.hpp"

namespace funnel {

// Closed-form constants attached to one (system, instance) pair. All the
// discretization caps below derive from these five numbers.
struct ConstantsChain {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double c = 1.0;
  double p = 2.0;
  double r = 1.0;
  double horizon = 1.0;

  double trajectory_bound = 0.0;    // alpha*: a-priori sup-norm bound on trajectories
  double horizon_floor = 1.0;       // l* = max{horizon, 1}
  double growth_exponent = 0.0;     // c0 = gamma1*horizon + 2*gamma2*r*l*
  double truncation_constant = 0.0; // kappa* = 2*gamma3*r^p*exp(c0)
  double grid_error_gain = 0.0;     // g1 = gamma3*horizon*exp(c0)

  // g(beta) = gamma1 + 2*gamma2*beta, the Gronwall rate at magnitude cap beta.
  double lipschitz_gain(double beta) const { return gamma1 + 2.0 * gamma2 * beta; }

  // phi(dt) = c(alpha*+1)(dt + r*dt^((p-1)/p)): the trajectory continuity
  // modulus implied by the growth bound and the Hoelder inequality.
  double time_modulus(double dt) const;

  // phi*(dt) = max{dt, phi(dt)}.
  double step_modulus(double dt) const;
};

// Gronwall bound from the growth condition:
//   alpha* = (||x0||+1) * exp(c*(horizon + r*horizon^((p-1)/p))) - 1.
// Every admissible trajectory satisfies ||x(t)|| <= alpha*.
double trajectory_bound(const DynamicsSpec& spec, const ProblemInstance& instance);

ConstantsChain derive_constants(const DynamicsSpec& spec, const ProblemInstance& instance);

// Accuracy-driven caps. For a target eps the four caps below make the finite
// control set an eps/2-approximation of the admissible set (and the Euler
// bundle a 3eps/5-approximation when the time step also satisfies the
// modulus threshold computed in epsilon_schedule).
double magnitude_cap_for(const ConstantsChain& chain, double eps);                 // beta*(eps)
double magnitude_step_for(const ConstantsChain& chain, double eps);                // delta*(eps)
double net_mesh_for(const ConstantsChain& chain, double eps, double beta);         // sigma*(eps, beta)
double time_step_for(const ConstantsChain& chain, double eps, double lip_radius);  // Delta*(eps)

} // namespace funnel
