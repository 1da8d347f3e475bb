#pragma once

#include "funnel/common.hpp"
#include "funnel/expr.hpp"

#include <functional>
#include <string>
#include <vector>

namespace funnel {

// Right-hand side writing dx/dt into `out` (preallocated to n).
using RhsFn = std::function<void(double t, const Vector& x, const Vector& u, Vector& out)>;

// A control system dx/dt = f(t, x, u) together with its declared regularity
// constants: gamma1..gamma3 bound state/control increments of f, c bounds
// growth as ||f|| <= c(||x||+1)(||u||+1). The constants are user-declared;
// validate_growth / validate_lipschitz check them by sampling.
struct DynamicsSpec {
  int n = 0; // state dimension
  int m = 0; // control dimension
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double c = 1.0;
  std::string label;
  RhsFn rhs;
  // Canonical per-component expression sources when the system is defined
  // through the DSL (catalog entries keep theirs for reference).
  std::vector<std::string> sources;

  void validate() const;
};

// Horizon, initial state, and the L_p budget on controls.
struct ProblemInstance {
  double t0 = 0.0;
  double theta = 1.0;
  Vector x0;
  double p = 2.0; // norm exponent, > 1
  double r = 1.0; // budget radius, > 0

  double horizon() const { return theta - t0; }
  void validate(int n) const;
};

// Checked evaluation: dimension mismatch -> ValidationError, non-finite
// component -> EvaluationError naming the component.
Vector eval_dynamics(const DynamicsSpec& spec, double t, const Vector& x, const Vector& u);

DynamicsSpec dynamics_from_expressions(std::vector<std::string> sources, int n, int m,
                                       double gamma1, double gamma2, double gamma3, double c,
                                       std::string label = "custom");

// Built-in systems: "integrator", "affine", "rotator", "saturating".
DynamicsSpec catalog_system(const std::string& name);
std::vector<std::string> catalog_names();

// Axis-aligned sampling region for the growth validator.
struct SampleBox {
  Vector x_lo, x_hi;
  Vector u_lo, u_hi;

  static SampleBox cube(int n, int m, double x_extent, double u_extent);
};

struct GrowthReport {
  double max_ratio = 0.0;
  long violations = 0;
  long samples = 0;
  double declared_c = 0.0;
  double worst_t = 0.0;
  Vector worst_x, worst_u;
  bool pass() const { return violations == 0; }
};

// Samples ||f(t,x,u)|| / ((||x||+1)(||u||+1)) over [t0,theta] x box and
// compares the empirical maximum against the declared c.
GrowthReport validate_growth(const DynamicsSpec& spec, const ProblemInstance& instance,
                             const SampleBox& box, long samples, std::uint64_t seed);

struct LipschitzReport {
  double max_ratio = 0.0;
  long violations = 0;
  long degenerate = 0; // zero-denominator pairs, skipped
  long samples = 0;
  bool pass() const { return violations == 0; }
};

// Samples pairs (t, x1, u1), (t, x2, u2) with x in the alpha ball and u in the
// beta ball and checks
//   ||f(t,x1,u1)-f(t,x2,u2)|| <= [g1 + g2(||u1||+||u2||)]||x1-x2|| + g3||u1-u2||.
LipschitzReport validate_lipschitz(const DynamicsSpec& spec, const ProblemInstance& instance,
                                   double alpha, double beta, long samples, std::uint64_t seed);

} // namespace funnel
