#include "funnel/dynamics.hpp"

#include "funnel/rng.hpp"

#include <cmath>
#include <memory>

namespace funnel {

void DynamicsSpec::validate() const {
  if (n < 1 || m < 1) throw ValidationError("system: n and m must be >= 1");
  if (gamma1 < 0 || gamma2 < 0 || gamma3 < 0)
    throw ValidationError("system: gamma constants must be nonnegative");
  if (!(c > 0)) throw ValidationError("system: growth constant c must be positive");
  if (!rhs) throw ValidationError("system: right-hand side is not set");
}

void ProblemInstance::validate(int n) const {
  if (!(theta > t0)) throw ValidationError("instance.theta: must exceed t0");
  if (!(p > 1)) throw ValidationError("instance.p: must be > 1");
  if (!(r > 0)) throw ValidationError("instance.r: must be > 0");
  if (x0.size() != n)
    throw ValidationError("instance.x0: dimension " + std::to_string(x0.size()) +
                          " does not match system n=" + std::to_string(n));
}

Vector eval_dynamics(const DynamicsSpec& spec, double t, const Vector& x, const Vector& u) {
  if (x.size() != spec.n)
    throw ValidationError("eval: state dimension " + std::to_string(x.size()) +
                          " does not match n=" + std::to_string(spec.n));
  if (u.size() != spec.m)
    throw ValidationError("eval: control dimension " + std::to_string(u.size()) +
                          " does not match m=" + std::to_string(spec.m));
  Vector out(spec.n);
  spec.rhs(t, x, u, out);
  for (int i = 0; i < spec.n; ++i) {
    if (!std::isfinite(out[i]))
      throw EvaluationError("eval: component " + std::to_string(i + 1) + " of f(" + spec.label +
                            ") is not finite at t=" + format_double(t));
  }
  return out;
}

DynamicsSpec dynamics_from_expressions(std::vector<std::string> sources, int n, int m,
                                       double gamma1, double gamma2, double gamma3, double c,
                                       std::string label) {
  if (static_cast<int>(sources.size()) != n)
    throw ValidationError("system.rhs: expected " + std::to_string(n) + " component expressions, got " +
                          std::to_string(sources.size()));
  auto programs = std::make_shared<std::vector<Expr>>();
  programs->reserve(sources.size());
  for (const std::string& src : sources) programs->push_back(parse_expression(src, n, m));

  DynamicsSpec spec;
  spec.n = n;
  spec.m = m;
  spec.gamma1 = gamma1;
  spec.gamma2 = gamma2;
  spec.gamma3 = gamma3;
  spec.c = c;
  spec.label = std::move(label);
  spec.sources = std::move(sources);
  spec.rhs = [programs](double t, const Vector& x, const Vector& u, Vector& out) {
    thread_local std::vector<double> stack;
    for (std::size_t i = 0; i < programs->size(); ++i)
      out[static_cast<Eigen::Index>(i)] = (*programs)[i].eval(t, x, u, stack);
  };
  spec.validate();
  return spec;
}

namespace {

DynamicsSpec make_catalog(int n, int m, double g1, double g2, double g3, double c,
                          std::string label, RhsFn rhs, std::vector<std::string> sources) {
  DynamicsSpec spec;
  spec.n = n;
  spec.m = m;
  spec.gamma1 = g1;
  spec.gamma2 = g2;
  spec.gamma3 = g3;
  spec.c = c;
  spec.label = std::move(label);
  spec.rhs = std::move(rhs);
  spec.sources = std::move(sources);
  return spec;
}

} // namespace

DynamicsSpec catalog_system(const std::string& name) {
  if (name == "integrator") {
    return make_catalog(
        1, 1, 0.0, 0.0, 1.0, 1.0, "integrator",
        [](double, const Vector&, const Vector& u, Vector& out) { out[0] = u[0]; }, {"u1"});
  }
  if (name == "affine") {
    return make_catalog(
        1, 1, 1.0, 0.0, 1.0, 1.0, "affine",
        [](double, const Vector& x, const Vector& u, Vector& out) { out[0] = x[0] + u[0]; },
        {"x1 + u1"});
  }
  if (name == "rotator") {
    return make_catalog(
        2, 2, 1.0, 0.0, 1.0, 1.0, "rotator",
        [](double, const Vector& x, const Vector& u, Vector& out) {
          out[0] = x[1] + u[0];
          out[1] = -x[0] + u[1];
        },
        {"x2 + u1", "-x1 + u2"});
  }
  if (name == "saturating") {
    // Constants valid on the test cylinder |x| <= 2, ||u|| <= 2: the cubic
    // term has slope 3*x^2 <= 12 and growth peaks at 8/3 < 3 there.
    return make_catalog(
        1, 1, 12.0, 0.0, 1.0, 3.0, "saturating",
        [](double, const Vector& x, const Vector& u, Vector& out) {
          out[0] = -x[0] * x[0] * x[0] + u[0];
        },
        {"-x1^3 + u1"});
  }
  throw ValidationError("unknown catalog system '" + name + "'");
}

std::vector<std::string> catalog_names() { return {"integrator", "affine", "rotator", "saturating"}; }

SampleBox SampleBox::cube(int n, int m, double x_extent, double u_extent) {
  SampleBox box;
  box.x_lo = Vector::Constant(n, -x_extent);
  box.x_hi = Vector::Constant(n, x_extent);
  box.u_lo = Vector::Constant(m, -u_extent);
  box.u_hi = Vector::Constant(m, u_extent);
  return box;
}

GrowthReport validate_growth(const DynamicsSpec& spec, const ProblemInstance& instance,
                             const SampleBox& box, long samples, std::uint64_t seed) {
  spec.validate();
  if (samples < 1) throw ValidationError("validate_growth: samples must be >= 1");
  Rng rng(seed);
  GrowthReport report;
  report.samples = samples;
  report.declared_c = spec.c;
  Vector out(spec.n);
  for (long k = 0; k < samples; ++k) {
    double t = uniform_real(rng, instance.t0, instance.theta);
    Vector x = uniform_in_box(rng, box.x_lo, box.x_hi);
    Vector u = uniform_in_box(rng, box.u_lo, box.u_hi);
    spec.rhs(t, x, u, out);
    double ratio = out.norm() / ((x.norm() + 1.0) * (u.norm() + 1.0));
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_t = t;
      report.worst_x = x;
      report.worst_u = u;
    }
    if (ratio > spec.c * (1.0 + 1e-12)) ++report.violations;
  }
  return report;
}

LipschitzReport validate_lipschitz(const DynamicsSpec& spec, const ProblemInstance& instance,
                                   double alpha, double beta, long samples, std::uint64_t seed) {
  spec.validate();
  if (!(alpha > 0) || !(beta > 0))
    throw ValidationError("validate_lipschitz: alpha and beta must be positive");
  if (samples < 1) throw ValidationError("validate_lipschitz: samples must be >= 1");
  Rng rng(seed);
  LipschitzReport report;
  report.samples = samples;
  Vector f1(spec.n), f2(spec.n);
  for (long k = 0; k < samples; ++k) {
    double t = uniform_real(rng, instance.t0, instance.theta);
    Vector x1 = uniform_in_ball(rng, spec.n, alpha);
    Vector x2 = uniform_in_ball(rng, spec.n, alpha);
    Vector u1 = uniform_in_ball(rng, spec.m, beta);
    Vector u2 = uniform_in_ball(rng, spec.m, beta);
    spec.rhs(t, x1, u1, f1);
    spec.rhs(t, x2, u2, f2);
    double denom = (spec.gamma1 + spec.gamma2 * (u1.norm() + u2.norm())) * (x1 - x2).norm() +
                   spec.gamma3 * (u1 - u2).norm();
    if (denom == 0.0) {
      ++report.degenerate;
      continue;
    }
    double ratio = (f1 - f2).norm() / denom;
    if (ratio > report.max_ratio) report.max_ratio = ratio;
    if (ratio > 1.0 + 1e-12) ++report.violations;
  }
  return report;
}

} // namespace funnel
