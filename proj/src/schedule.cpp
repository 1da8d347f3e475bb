#include "funnel/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace funnel {

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) out[static_cast<std::size_t>(i)] = node(i);
  return out;
}

int TimeGrid::interval_of(double t) const {
  if (t < t0 || t > theta) throw ValidationError("time " + format_double(t) + " outside horizon");
  int lo = 0, hi = steps;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (node(mid) <= t)
      lo = mid;
    else
      hi = mid;
  }
  return std::min(lo, steps - 1);
}

DiscretizationPlan DiscretizationPlan::direct(const ProblemInstance& instance, double beta,
                                              int time_steps, int magnitude_steps, double sigma,
                                              double lip_radius) {
  DiscretizationPlan plan;
  plan.t0 = instance.t0;
  plan.theta = instance.theta;
  plan.p = instance.p;
  plan.r = instance.r;
  plan.beta = beta;
  plan.time_steps = time_steps;
  plan.magnitude_steps = magnitude_steps;
  plan.sigma = sigma;
  plan.lip_radius = lip_radius;
  plan.validate();
  return plan;
}

void DiscretizationPlan::validate() const {
  if (!(theta > t0)) throw ValidationError("plan: theta must exceed t0");
  if (!(p > 1)) throw ValidationError("plan: p must be > 1");
  if (!(r > 0)) throw ValidationError("plan: r must be > 0");
  if (!(beta > 0)) throw ValidationError("plan.beta: must be positive");
  if (time_steps < 1) throw ValidationError("plan.N: must be >= 1");
  if (magnitude_steps < 1) throw ValidationError("plan.q: must be >= 1");
  if (!(sigma > 0)) throw ValidationError("plan.sigma: must be positive");
  if (!(lip_radius > 0)) throw ValidationError("plan.R_star: must be positive");
}

namespace {

struct AnchorGrid {
  std::vector<double> t_values;
  std::vector<double> axis_x; // shared per-axis grid on [-alpha, alpha]
  std::vector<double> axis_u; // shared per-axis grid on [-beta, beta]
};

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return v;
}

// Shared scan: for each anchor (t, x, u) and each displacement s, probes
// time-only, per-axis state-only, and joint displacements, and accumulates
// the largest ||f(t2,x2,u) - f(t,x,u)|| into maxima[s-index].
void omega_scan(const DynamicsSpec& spec, const ProblemInstance& instance, double alpha,
                double beta, const std::vector<double>& displacements, const OmegaOptions& options,
                std::vector<double>& maxima) {
  maxima.assign(displacements.size(), 0.0);
  if (displacements.empty()) return;

  const int axes = 1 + spec.n + spec.m;
  int per_axis = std::max(2, options.grid_density);
  auto cost = [&](int per) {
    double anchors = std::pow(static_cast<double>(per), axes);
    double per_anchor = 1.0 + static_cast<double>(displacements.size()) * (2.0 + 6.0 * spec.n);
    return anchors * per_anchor;
  };
  while (per_axis > 2 && cost(per_axis) > static_cast<double>(options.max_evals)) --per_axis;

  AnchorGrid grid;
  grid.t_values = linspace(instance.t0, instance.theta, per_axis);
  grid.axis_x = linspace(-alpha, alpha, per_axis);
  grid.axis_u = linspace(-beta, beta, per_axis);

  std::vector<int> odo(static_cast<std::size_t>(axes), 0);
  Vector x(spec.n), u(spec.m), x2(spec.n), f0(spec.n), f1(spec.n);

  auto probe = [&](double t2, const Vector& xq, std::size_t s_idx) {
    spec.rhs(t2, xq, u, f1);
    double v = (f1 - f0).norm();
    if (v > maxima[s_idx]) maxima[s_idx] = v;
  };

  bool done = false;
  while (!done) {
    double t = grid.t_values[static_cast<std::size_t>(odo[0])];
    for (int k = 0; k < spec.n; ++k) x[k] = grid.axis_x[static_cast<std::size_t>(odo[1 + k])];
    for (int k = 0; k < spec.m; ++k)
      u[k] = grid.axis_u[static_cast<std::size_t>(odo[1 + spec.n + k])];

    if (x.norm() <= alpha && u.norm() <= beta) {
      spec.rhs(t, x, u, f0);
      for (std::size_t si = 0; si < displacements.size(); ++si) {
        double s = displacements[si];
        double t_fwd = t + s, t_bwd = t - s;
        bool fwd = t_fwd <= instance.theta, bwd = t_bwd >= instance.t0;
        if (fwd) probe(t_fwd, x, si);
        if (bwd) probe(t_bwd, x, si);
        for (int k = 0; k < spec.n; ++k) {
          for (double sign : {1.0, -1.0}) {
            x2 = x;
            x2[k] += sign * s;
            if (x2.norm() > alpha) continue;
            probe(t, x2, si);
            if (fwd) probe(t_fwd, x2, si);
            if (bwd) probe(t_bwd, x2, si);
          }
        }
      }
    }

    int axis = axes - 1;
    while (axis >= 0) {
      if (++odo[static_cast<std::size_t>(axis)] < per_axis) break;
      odo[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    done = axis < 0;
  }
}

// Displacement ladder shared by every radius: nested candidate sets keep the
// estimate nondecreasing across radii, the exact endpoint keeps it sharp.
std::vector<double> rungs_up_to(double radius, double reference, int ladder) {
  std::vector<double> s;
  for (int k = 1; k <= ladder; ++k) {
    double v = reference * k / ladder;
    if (v < radius) s.push_back(v);
  }
  s.push_back(radius);
  return s;
}

} // namespace

double estimate_omega(const DynamicsSpec& spec, const ProblemInstance& instance, double alpha,
                      double beta, double radius, const OmegaOptions& options) {
  spec.validate();
  instance.validate(spec.n);
  if (options.grid_density < 2) throw ValidationError("estimate_omega: grid_density must be >= 2");
  if (!(alpha > 0) || !(beta > 0)) throw ValidationError("estimate_omega: alpha, beta must be positive");
  if (!(radius > 0)) return 0.0;

  double reference = std::max(2.0 * alpha, instance.horizon());
  std::vector<double> displacements = rungs_up_to(radius, reference, options.ladder);
  std::vector<double> maxima;
  omega_scan(spec, instance, alpha, beta, displacements, options, maxima);
  return *std::max_element(maxima.begin(), maxima.end());
}

DiscretizationPlan epsilon_schedule(const DynamicsSpec& spec, const ConstantsChain& chain,
                                    const ProblemInstance& instance, double eps, double lip_radius,
                                    const Caps& caps, const OmegaOptions& omega_options,
                                    const OmegaFn& omega_override) {
  spec.validate();
  instance.validate(spec.n);
  if (!(eps > 0)) throw ValidationError("epsilon must be positive");
  if (!(lip_radius > 0)) throw ValidationError("R_star must be positive");

  const double horizon = instance.horizon();
  const double beta = magnitude_cap_for(chain, eps);
  const double delta_cap = magnitude_step_for(chain, eps);
  const double sigma = net_mesh_for(chain, eps, beta);
  const double dt_lip = time_step_for(chain, eps, lip_radius);

  // Largest dt whose modulus omega(phi*(dt), beta) stays under the Euler
  // error allowance eps / (10 exp(g(beta) * horizon)).
  const double allowance = eps / (10.0 * std::exp(chain.lipschitz_gain(beta) * horizon));
  double dt_omega = horizon;
  {
    auto omega_at = [&](double rho) {
      if (omega_override) return omega_override(rho, beta);
      return estimate_omega(spec, instance, chain.trajectory_bound, beta, rho, omega_options);
    };
    if (omega_at(chain.step_modulus(horizon)) > allowance) {
      // One scan fills the whole rung table; bisection then only reads it.
      double reference = std::max(2.0 * chain.trajectory_bound, horizon);
      std::vector<double> rungs;
      for (int k = 1; k <= omega_options.ladder; ++k)
        rungs.push_back(reference * k / omega_options.ladder);
      std::vector<double> maxima;
      if (!omega_override) omega_scan(spec, instance, chain.trajectory_bound, beta, rungs,
                                      omega_options, maxima);
      auto table_estimate = [&](double rho) {
        if (omega_override) return omega_override(rho, beta);
        double best = 0.0;
        for (std::size_t k = 0; k < rungs.size() && rungs[k] <= rho; ++k)
          best = std::max(best, maxima[k]);
        return best;
      };
      double lo = 0.0, hi = horizon;
      for (int iter = 0; iter < 60; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (table_estimate(chain.step_modulus(mid)) <= allowance)
          lo = mid;
        else
          hi = mid;
      }
      dt_omega = lo;
      // The table skips the exact endpoint; verify with the sharp estimate
      // and back off while it overshoots.
      for (int iter = 0; iter < 60 && dt_omega > 0; ++iter) {
        if (omega_at(chain.step_modulus(dt_omega)) <= allowance) break;
        dt_omega *= 0.9;
      }
      if (!(dt_omega > 0))
        throw CapacityError("epsilon_schedule: no positive time step satisfies the modulus threshold");
    }
  }

  const double dt_cap = std::min({dt_lip, dt_omega, eps / 10.0});

  double n_required = std::ceil(horizon / dt_cap);
  double q_required = std::ceil(beta / delta_cap);
  if (n_required > caps.max_time_steps || q_required > caps.max_magnitude_steps)
    throw CapacityError("epsilon_schedule: requires N=" + format_double(n_required) +
                        " time steps and q=" + format_double(q_required) +
                        " magnitude steps (caps: N<=" + std::to_string(caps.max_time_steps) +
                        ", q<=" + std::to_string(caps.max_magnitude_steps) + ")");

  DiscretizationPlan plan;
  plan.t0 = instance.t0;
  plan.theta = instance.theta;
  plan.p = instance.p;
  plan.r = instance.r;
  plan.beta = beta;
  plan.sigma = sigma;
  plan.lip_radius = lip_radius;
  plan.epsilon = eps;
  // ceil can land one rounding ulp above the cap; bump until the realized
  // steps respect it
  plan.time_steps = static_cast<int>(n_required);
  while (plan.dt() > dt_cap) ++plan.time_steps;
  plan.magnitude_steps = static_cast<int>(q_required);
  while (plan.magnitude_step() > delta_cap) ++plan.magnitude_steps;
  plan.validate();
  return plan;
}

} // namespace funnel
