#include "funnel/dynamics.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace funnel;
using funnel::testing::unit_instance;

TEST_CASE("catalog right-hand sides match their formulas") {
  DynamicsSpec integrator = catalog_system("integrator");
  CHECK(eval_dynamics(integrator, 0.0, Vector::Zero(1), Vector::Constant(1, 0.5))[0] == 0.5);

  DynamicsSpec affine = catalog_system("affine");
  CHECK(eval_dynamics(affine, 0.0, Vector::Constant(1, 1.0), Vector::Constant(1, 0.5))[0] == 1.5);

  DynamicsSpec saturating = catalog_system("saturating");
  CHECK(eval_dynamics(saturating, 0.0, Vector::Constant(1, 2.0), Vector::Zero(1))[0] == -8.0);

  DynamicsSpec rotator = catalog_system("rotator");
  Vector x(2), u(2);
  x << 1.0, 2.0;
  u << 0.25, -0.5;
  Vector f = eval_dynamics(rotator, 0.0, x, u);
  CHECK(f[0] == 2.25);
  CHECK(f[1] == -1.5);

  CHECK_THROWS_AS(catalog_system("unknown"), ValidationError);
}

TEST_CASE("eval rejects dimension mismatches and non-finite results") {
  DynamicsSpec integrator = catalog_system("integrator");
  CHECK_THROWS_AS(eval_dynamics(integrator, 0.0, Vector::Zero(2), Vector::Zero(1)),
                  ValidationError);
  CHECK_THROWS_AS(eval_dynamics(integrator, 0.0, Vector::Zero(1), Vector::Zero(2)),
                  ValidationError);

  DynamicsSpec pole = dynamics_from_expressions({"1/(x1 - x1)"}, 1, 1, 0, 0, 1, 1, "pole");
  CHECK_THROWS_WITH_AS(eval_dynamics(pole, 0.0, Vector::Zero(1), Vector::Zero(1)),
                       doctest::Contains("component 1"), EvaluationError);
}

TEST_CASE("expression-backed systems agree with compiled ones") {
  DynamicsSpec compiled = catalog_system("rotator");
  DynamicsSpec parsed =
      dynamics_from_expressions(compiled.sources, 2, 2, compiled.gamma1, compiled.gamma2,
                                compiled.gamma3, compiled.c, "rotator-dsl");
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    Vector x = uniform_in_ball(rng, 2, 3.0);
    Vector u = uniform_in_ball(rng, 2, 2.0);
    double t = uniform_real(rng, 0.0, 1.0);
    CHECK((eval_dynamics(compiled, t, x, u) - eval_dynamics(parsed, t, x, u)).norm() == 0.0);
  }
}

TEST_CASE("growth validator accepts the integrator and affine bounds") {
  ProblemInstance instance = unit_instance();
  SampleBox box = SampleBox::cube(1, 1, 10.0, 10.0);

  GrowthReport integ = validate_growth(catalog_system("integrator"), instance, box, 20000, 11);
  CHECK(integ.violations == 0);
  CHECK(integ.max_ratio <= 1.0);

  GrowthReport aff = validate_growth(catalog_system("affine"), instance, box, 20000, 12);
  CHECK(aff.violations == 0);
}

TEST_CASE("growth validator reports quadratic violations") {
  DynamicsSpec quad = dynamics_from_expressions({"x1^2"}, 1, 1, 0, 0, 1, 1.0, "quadratic");
  ProblemInstance instance = unit_instance();
  GrowthReport report =
      validate_growth(quad, instance, SampleBox::cube(1, 1, 10.0, 10.0), 50000, 13);
  CHECK(report.violations > 0);
  // ratio approaches 100/11 near x = 10, u = 0
  CHECK(report.max_ratio > 8.0);
  CHECK(report.max_ratio < 100.0 / 11.0 + 1e-6);
}

TEST_CASE("lipschitz validator: equality case and declared-constant violations") {
  ProblemInstance instance = unit_instance();

  LipschitzReport integ =
      validate_lipschitz(catalog_system("integrator"), instance, 10.0, 10.0, 20000, 21);
  CHECK(integ.violations == 0);
  CHECK(integ.max_ratio == doctest::Approx(1.0).epsilon(1e-9));

  LipschitzReport aff = validate_lipschitz(catalog_system("affine"), instance, 10.0, 10.0, 20000, 22);
  CHECK(aff.violations == 0);

  DynamicsSpec weak = catalog_system("affine");
  weak.gamma1 = 0.5;
  LipschitzReport bad = validate_lipschitz(weak, instance, 10.0, 10.0, 20000, 23);
  CHECK(bad.violations > 0);
  CHECK(bad.max_ratio > 1.0);
}

TEST_CASE("catalog constants pass both validators at 1e5 samples") {
  ProblemInstance scalar = unit_instance();
  ProblemInstance planar = scalar;
  planar.x0 = Vector::Zero(2);

  for (const std::string& name : catalog_names()) {
    DynamicsSpec spec = catalog_system(name);
    const ProblemInstance& instance = spec.n == 2 ? planar : scalar;
    // The saturating cubic declares constants for the |x|,|u| <= 2 region;
    // the globally bounded systems use a wide box.
    double extent = name == "saturating" ? 2.0 : 10.0;
    GrowthReport growth =
        validate_growth(spec, instance, SampleBox::cube(spec.n, spec.m, extent, extent), 100000, 31);
    CAPTURE(name);
    CHECK(growth.violations == 0);
    LipschitzReport lip = validate_lipschitz(spec, instance, extent, extent, 100000, 32);
    CHECK(lip.violations == 0);
  }
}

TEST_CASE("repeated evaluation is bitwise identical") {
  DynamicsSpec spec = catalog_system("saturating");
  Vector x = Vector::Constant(1, 1.7);
  Vector u = Vector::Constant(1, -0.3);
  Vector first = eval_dynamics(spec, 0.4, x, u);
  for (int k = 0; k < 5; ++k) CHECK((eval_dynamics(spec, 0.4, x, u) - first).norm() == 0.0);
}
