#include "funnel/trajectory.hpp"

#include "funnel/constants.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace funnel;
using funnel::testing::unit_instance;

namespace {

ControlWord constant_word(int steps, int level, int direction) {
  ControlWord word;
  word.levels.assign(static_cast<std::size_t>(steps), level);
  word.directions.assign(static_cast<std::size_t>(steps), level == 0 ? 0 : direction);
  return word;
}

} // namespace

TEST_CASE("broken line of the integrator under u = +1") {
  ProblemInstance instance = unit_instance();
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 2, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0); // {-1, +1}
  EulerPolyline line =
      euler_broken_line(catalog_system("integrator"), instance, plan, net, constant_word(2, 1, 1));
  REQUIRE(line.nodes.size() == 3);
  CHECK(line.nodes[0][0] == 0.0);
  CHECK(line.nodes[1][0] == 0.5);
  CHECK(line.nodes[2][0] == 1.0);
  CHECK(line.at(0.25)[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("broken line of dx/dt = x via the affine system and the zero word") {
  ProblemInstance instance = unit_instance(1.0);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 2, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  EulerPolyline line =
      euler_broken_line(catalog_system("affine"), instance, plan, net, constant_word(2, 0, 0));
  CHECK(line.nodes[0][0] == 1.0);
  CHECK(line.nodes[1][0] == 1.5);
  CHECK(line.nodes[2][0] == 2.25);
}

TEST_CASE("zero word keeps the integrator at its initial state") {
  ProblemInstance instance = unit_instance(0.25);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  EulerPolyline line =
      euler_broken_line(catalog_system("integrator"), instance, plan, net, constant_word(4, 0, 0));
  for (const Vector& z : line.nodes) CHECK(z[0] == 0.25);
}

TEST_CASE("the recurrence residual is exactly zero at every node") {
  ProblemInstance instance = unit_instance(0.5, 2.0, 0.75);
  instance.x0 = Vector::Zero(2);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.5, 5, 3, 0.9);
  SigmaNet net = build_sigma_net(2, 0.9);
  DynamicsSpec spec = catalog_system("rotator");
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    ControlWord word = funnel::testing::random_feasible_word(plan, net, rng);
    EulerPolyline line = euler_broken_line(spec, instance, plan, net, word);
    for (int i = 0; i < plan.time_steps; ++i) {
      Vector u = word_value(word, plan, net, i);
      Vector f = eval_dynamics(spec, plan.grid().node(i), line.nodes[static_cast<std::size_t>(i)], u);
      Vector rebuilt = line.nodes[static_cast<std::size_t>(i)] + plan.dt() * f;
      CHECK((line.nodes[static_cast<std::size_t>(i) + 1] - rebuilt).norm() == 0.0);
    }
  }
}

TEST_CASE("oracle integration is exact for the integrator and accurate for exp") {
  SigmaNet net = build_sigma_net(1, 1.0);

  SUBCASE("integrator endpoint") {
    ProblemInstance instance = unit_instance();
    DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 1, 1.0);
    for (int substeps : {1, 8, 32}) {
      SampledTrajectory traj = integrate_trajectory(catalog_system("integrator"), instance, plan,
                                                    net, constant_word(4, 1, 1), substeps);
      CHECK(traj.states.back()[0] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(traj.times.front() == instance.t0);
      CHECK(traj.times.back() == instance.theta);
    }
  }

  SUBCASE("exp endpoint within 1e-8 at 64 substeps") {
    ProblemInstance instance = unit_instance(1.0);
    DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 1, 1, 1.0);
    SampledTrajectory traj = integrate_trajectory(catalog_system("affine"), instance, plan, net,
                                                  constant_word(1, 0, 0), 64);
    CHECK(std::abs(traj.states.back()[0] - std::exp(1.0)) < 1e-8);
  }

  SUBCASE("dissipative cubic decays monotonically") {
    ProblemInstance instance = unit_instance(2.0);
    DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 1, 1.0);
    SampledTrajectory traj = integrate_trajectory(catalog_system("saturating"), instance, plan, net,
                                                  constant_word(4, 0, 0), 16);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      CHECK(traj.states[k][0] <= traj.states[k - 1][0]);
      CHECK(traj.states[k][0] >= 0.0);
    }
  }
}

TEST_CASE("endpoint convergence is order four") {
  ProblemInstance instance = unit_instance(1.0, 2.0, 0.5);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 0.5, 2, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  ConvergenceProbe probe =
      convergence_probe(catalog_system("affine"), instance, plan, net, constant_word(2, 1, 1), 4);
  CHECK(probe.ratio > 8.0);
  CHECK(probe.ratio < 40.0);
}

TEST_CASE("integration is deterministic") {
  ProblemInstance instance = unit_instance(0.3);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 3, 2, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  ControlWord word{{1, 2, 0}, {1, 0, 0}};
  SampledTrajectory a = integrate_trajectory(catalog_system("saturating"), instance, plan, net, word, 16);
  SampledTrajectory b = integrate_trajectory(catalog_system("saturating"), instance, plan, net, word, 16);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK((a.states[k] - b.states[k]).norm() == 0.0);
}

TEST_CASE("unstable Euler steps trip the divergence guard with the step index") {
  ProblemInstance instance = unit_instance(2.0, 2.0, 0.01, 0.0, 4.0);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  CHECK_THROWS_WITH_AS(euler_broken_line(catalog_system("saturating"), instance, plan, net,
                                         constant_word(4, 0, 0)),
                       doctest::Contains("step 4"), DivergenceError);
}

TEST_CASE("modulus check against the growth modulus") {
  ProblemInstance instance = unit_instance();
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 1, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  DynamicsSpec spec = catalog_system("integrator");
  ConstantsChain chain = derive_constants(spec, instance);
  auto phi = [&](double gap) { return chain.time_modulus(gap); };

  SUBCASE("constant trajectory has ratio zero") {
    SampledTrajectory still =
        integrate_trajectory(spec, instance, plan, net, constant_word(4, 0, 0), 8);
    ModulusReport report = modulus_check(still, phi);
    CHECK(report.pass);
    CHECK(report.max_ratio == 0.0);
  }

  SUBCASE("unit drive stays under the modulus") {
    SampledTrajectory drive =
        integrate_trajectory(spec, instance, plan, net, constant_word(4, 1, 1), 8);
    ModulusReport report = modulus_check(drive, phi);
    CHECK(report.pass);
    CHECK(report.max_ratio <= 1.0);
  }

  SUBCASE("a scaled-down modulus is reported as a violation") {
    SampledTrajectory drive =
        integrate_trajectory(spec, instance, plan, net, constant_word(4, 1, 1), 8);
    ModulusReport report = modulus_check(drive, [&](double gap) { return 1e-3 * phi(gap); });
    CHECK_FALSE(report.pass);
    CHECK(report.max_ratio > 1.0);
  }
}

TEST_CASE("per-word Euler gap honors the modulus bound on a small instance") {
  DynamicsSpec spec = catalog_system("affine");
  ProblemInstance instance = unit_instance(0.0, 2.0, 0.25);
  ConstantsChain chain = derive_constants(spec, instance);
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 2, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);

  double omega = estimate_omega(spec, instance, chain.trajectory_bound, plan.beta,
                                chain.step_modulus(plan.dt()));
  double bound = omega * chain.horizon * std::exp(chain.lipschitz_gain(plan.beta) * chain.horizon);

  for_each_word(plan, net, 100000, [&](long, const ControlWord& word) {
    EulerPolyline line = euler_broken_line(spec, instance, plan, net, word);
    SampledTrajectory oracle = integrate_trajectory(spec, instance, plan, net, word, 64);
    double gap = 0.0;
    for (int i = 0; i <= plan.time_steps; ++i)
      gap = std::max(gap, (line.nodes[static_cast<std::size_t>(i)] -
                           oracle.at(plan.grid().node(i)))
                              .norm());
    CHECK(gap <= bound);
  });
}
