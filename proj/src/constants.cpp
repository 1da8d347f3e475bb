#include "funnel/constants.hpp"

#include <cmath>

namespace funnel {

double ConstantsChain::time_modulus(double dt) const {
  if (!(dt > 0)) return 0.0;
  return c * (trajectory_bound + 1.0) * (dt + r * std::pow(dt, (p - 1.0) / p));
}

double ConstantsChain::step_modulus(double dt) const { return std::max(dt, time_modulus(dt)); }

double trajectory_bound(const DynamicsSpec& spec, const ProblemInstance& instance) {
  instance.validate(spec.n);
  double h = instance.horizon();
  double control_mass = instance.r * std::pow(h, (instance.p - 1.0) / instance.p);
  return (instance.x0.norm() + 1.0) * std::exp(spec.c * (h + control_mass)) - 1.0;
}

ConstantsChain derive_constants(const DynamicsSpec& spec, const ProblemInstance& instance) {
  spec.validate();
  instance.validate(spec.n);
  ConstantsChain chain;
  chain.gamma1 = spec.gamma1;
  chain.gamma2 = spec.gamma2;
  chain.gamma3 = spec.gamma3;
  chain.c = spec.c;
  chain.p = instance.p;
  chain.r = instance.r;
  chain.horizon = instance.horizon();
  chain.trajectory_bound = trajectory_bound(spec, instance);
  chain.horizon_floor = std::max(chain.horizon, 1.0);
  chain.growth_exponent = chain.gamma1 * chain.horizon + 2.0 * chain.gamma2 * chain.r * chain.horizon_floor;
  chain.truncation_constant =
      2.0 * chain.gamma3 * std::pow(chain.r, chain.p) * std::exp(chain.growth_exponent);
  chain.grid_error_gain = chain.gamma3 * chain.horizon * std::exp(chain.growth_exponent);
  return chain;
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0)) throw ValidationError("epsilon must be positive");
}

} // namespace

double magnitude_cap_for(const ConstantsChain& chain, double eps) {
  check_eps(eps);
  return std::pow(10.0 * chain.truncation_constant / eps, 1.0 / (chain.p - 1.0));
}

double magnitude_step_for(const ConstantsChain& chain, double eps) {
  check_eps(eps);
  return eps / (10.0 * chain.grid_error_gain);
}

double net_mesh_for(const ConstantsChain& chain, double eps, double beta) {
  check_eps(eps);
  if (!(beta > 0)) throw ValidationError("net_mesh_for: beta must be positive");
  return eps / (10.0 * chain.grid_error_gain * beta);
}

double time_step_for(const ConstantsChain& chain, double eps, double lip_radius) {
  check_eps(eps);
  if (!(lip_radius > 0)) throw ValidationError("time_step_for: Lipschitz radius must be positive");
  return eps / (10.0 * chain.grid_error_gain * lip_radius);
}

} // namespace funnel
