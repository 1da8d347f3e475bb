// Acceptance suite: one check per shipped guarantee, each with a wall-clock
// budget. Prints one line per criterion and exits nonzero on any failure.

#include "funnel/csv.hpp"
#include "funnel/metrics.hpp"
#include "funnel/pipeline.hpp"
#include "helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace funnel;
using funnel::testing::unit_instance;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

template <typename T>
std::string str(const T& value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

int failures = 0;

void criterion(int number, const std::string& name, double budget_seconds,
               const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    body();
  } catch (const std::exception& err) {
    error = err.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (error.empty() && elapsed > budget_seconds)
    error = "exceeded the " + str(budget_seconds) + " s budget";
  std::cout << "criterion " << number << " (" << name << "): " << (error.empty() ? "PASS" : "FAIL")
            << " [" << str(elapsed) << " s]";
  if (!error.empty()) {
    std::cout << " -- " << error;
    ++failures;
  }
  std::cout << "\n" << std::flush;
}

void check_close(double got, double expected, double tol, const std::string& what) {
  require(std::abs(got - expected) <= tol,
          what + ": got " + format_double(got) + ", expected " + format_double(expected));
}

// ---- criterion 6 oracle: reachable endpoint sums of the integrator --------
// Signed magnitude sums reachable under the budget, by dynamic programming
// over (sum of signed levels, sum of squared levels).
std::vector<double> reachable_endpoints(const DiscretizationPlan& plan) {
  const int N = plan.time_steps;
  const int q = plan.magnitude_steps;
  const int max_sum = N * q;
  const int max_sq = N * q * q;
  auto at = [&](std::vector<char>& grid, int k, int s) -> char& {
    return grid[static_cast<std::size_t>((k + max_sum) * (max_sq + 1) + s)];
  };
  std::vector<char> reachable(static_cast<std::size_t>(2 * max_sum + 1) * (max_sq + 1), 0);
  at(reachable, 0, 0) = 1;
  for (int i = 0; i < N; ++i) {
    std::vector<char> next(reachable.size(), 0);
    for (int k = -max_sum; k <= max_sum; ++k)
      for (int s = 0; s <= max_sq; ++s) {
        if (!at(reachable, k, s)) continue;
        for (int j = 0; j <= q; ++j)
          for (int sign : {1, -1}) {
            if (j == 0 && sign < 0) continue;
            int k2 = k + sign * j;
            int s2 = s + j * j;
            if (std::abs(k2) > max_sum || s2 > max_sq) continue;
            at(next, k2, s2) = 1;
          }
      }
    reachable.swap(next);
  }
  const double delta = plan.magnitude_step();
  const double budget = std::pow(plan.r, plan.p);
  std::set<double> endpoints;
  for (int k = -max_sum; k <= max_sum; ++k)
    for (int s = 0; s <= max_sq; ++s)
      if (at(reachable, k, s) && static_cast<double>(s) * delta * delta * plan.dt() <= budget)
        endpoints.insert(static_cast<double>(k) * delta * plan.dt());
  return {endpoints.begin(), endpoints.end()};
}

double directed_to_values(const std::vector<Vector>& reference, const std::vector<double>& values) {
  double worst = 0.0;
  for (const Vector& ref : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : values) best = std::min(best, std::abs(ref[0] - v));
    worst = std::max(worst, best);
  }
  return worst;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ----------------------------------------------------------------------------

void criterion_constants() {
  DynamicsSpec spec = catalog_system("integrator"); // gamma = (0,0,1), c = 1
  ProblemInstance instance = unit_instance();
  ConstantsChain chain = derive_constants(spec, instance);
  check_close(chain.horizon_floor, 1.0, 1e-12, "l*");
  check_close(chain.growth_exponent, 0.0, 1e-12, "c0");
  check_close(chain.truncation_constant, 2.0, 1e-12, "kappa*");
  check_close(chain.grid_error_gain, 1.0, 1e-12, "g1");
  const double eps = 2.0;
  double beta = magnitude_cap_for(chain, eps);
  check_close(beta, 10.0, 1e-12, "beta*(2)");
  check_close(magnitude_step_for(chain, eps), 0.2, 1e-12, "delta*(2)");
  check_close(net_mesh_for(chain, eps, beta), 0.02, 1e-12, "sigma*(2)");
  check_close(time_step_for(chain, eps, 1.0), 0.2, 1e-12, "Delta*(2)");
}

void criterion_budget_fidelity() {
  ProblemInstance instance = unit_instance();
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 2.0, 2, 2, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  std::vector<ControlWord> words = funnel::testing::collect_words(plan, net);
  require(words.size() == 9, "expected 9 canonical words, got " + str(words.size()));
  std::set<funnel::testing::WordKey> brute = funnel::testing::brute_force_words(plan, net);
  require(brute.size() == 9, "brute force disagrees: " + str(brute.size()));
  std::set<funnel::testing::WordKey> emitted;
  for (const ControlWord& w : words) emitted.insert({w.levels, w.directions});
  require(emitted == brute, "enumeration and brute force disagree on the word set");
  for (const ControlWord& w : words) require(feasible(w, plan), "emitted word is infeasible");
}

void criterion_internal_approximation() {
  struct Setup {
    const char* system;
    ProblemInstance instance;
    DiscretizationPlan plan;
    double sigma;
  };
  ProblemInstance scalar_unit = unit_instance();
  ProblemInstance scalar_half = unit_instance(0.0, 2.0, 0.5);
  ProblemInstance planar = unit_instance();
  planar.x0 = Vector::Zero(2);

  std::vector<Setup> setups;
  setups.push_back({"integrator", scalar_unit,
                    DiscretizationPlan::direct(scalar_unit, 2.0, 4, 3, 1.0), 1.0});
  setups.push_back({"affine", scalar_half,
                    DiscretizationPlan::direct(scalar_half, 1.0, 4, 2, 1.0), 1.0});
  setups.push_back({"rotator", planar, DiscretizationPlan::direct(planar, 2.0, 3, 2, 1.0), 1.0});

  for (const Setup& setup : setups) {
    DynamicsSpec spec = catalog_system(setup.system);
    SigmaNet net = build_sigma_net(spec.m, setup.sigma);
    long count = 0;
    for_each_word(setup.plan, net, 1000000, [&](long, const ControlWord& word) {
      ++count;
      require(word_lp_norm(word, setup.plan) <= setup.instance.r + 1e-12,
              std::string(setup.system) + ": word exceeds the budget radius");
    });
    require(count > 1, std::string(setup.system) + ": enumeration is degenerate");
  }

  // Hoelder bound on the integrator endpoints: |x(theta)| <= r * horizon^(1/2).
  const Setup& integ = setups[0];
  DynamicsSpec spec = catalog_system("integrator");
  SigmaNet net = build_sigma_net(1, integ.sigma);
  const double bound =
      integ.instance.r * std::sqrt(integ.instance.horizon()) + 1e-8;
  for_each_word(integ.plan, net, 1000000, [&](long, const ControlWord& word) {
    SampledTrajectory traj =
        integrate_trajectory(spec, integ.instance, integ.plan, net, word, 32);
    require(std::abs(traj.states.back()[0]) <= bound,
            "integrator endpoint " + format_double(traj.states.back()[0]) +
                " breaks the analytic bound " + format_double(bound));
  });
}

void criterion_euler_gap() {
  DynamicsSpec spec = catalog_system("affine");
  ProblemInstance instance = unit_instance(0.0, 2.0, 0.25);
  ConstantsChain chain = derive_constants(spec, instance);
  SigmaNet net = build_sigma_net(1, 1.0);
  OmegaOptions omega_options; // 64 per axis
  for (int steps : {4, 8, 16}) {
    DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, steps, 2, 1.0);
    double omega = estimate_omega(spec, instance, chain.trajectory_bound, plan.beta,
                                  chain.step_modulus(plan.dt()), omega_options);
    double bound =
        omega * chain.horizon * std::exp(chain.lipschitz_gain(plan.beta) * chain.horizon);
    long violations = 0;
    long words = 0;
    for_each_word(plan, net, 1000000, [&](long, const ControlWord& word) {
      ++words;
      EulerPolyline line = euler_broken_line(spec, instance, plan, net, word);
      SampledTrajectory oracle = integrate_trajectory(spec, instance, plan, net, word, 64);
      double gap = 0.0;
      for (int i = 0; i <= plan.time_steps; ++i)
        gap = std::max(gap, (line.nodes[static_cast<std::size_t>(i)] -
                             oracle.at(plan.grid().node(i)))
                                .norm());
      if (gap > bound) ++violations;
    });
    require(violations == 0, "N=" + str(steps) + ": " + str(violations) + " of " + str(words) +
                                 " words break the modulus bound " + format_double(bound));
  }
}

void criterion_trajectory_modulus() {
  Rng rng(2026);
  for (const char* name : {"integrator", "affine"}) {
    DynamicsSpec spec = catalog_system(name);
    ProblemInstance instance = unit_instance();
    ConstantsChain chain = derive_constants(spec, instance);
    DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 6, 3, 1.0);
    SigmaNet net = build_sigma_net(1, 1.0);
    auto phi = [&](double gap) { return chain.time_modulus(gap); };
    for (int k = 0; k < 100; ++k) {
      ControlWord word = funnel::testing::random_feasible_word(plan, net, rng);
      SampledTrajectory traj = integrate_trajectory(spec, instance, plan, net, word, 32);
      ModulusReport report = modulus_check(traj, phi);
      require(report.pass, std::string(name) + ": modulus ratio " +
                               format_double(report.max_ratio) + " above 1");
    }
  }
}

void criterion_convergence_trend() {
  DynamicsSpec spec = catalog_system("integrator");
  ProblemInstance instance = unit_instance(); // p = 2, r = 1, theta = 1
  const double beta = 8.0;
  std::vector<DiscretizationPlan> plans{
      DiscretizationPlan::direct(instance, beta, 2, 2, 2.0),
      DiscretizationPlan::direct(instance, beta, 4, 4, 1.0),
      DiscretizationPlan::direct(instance, beta, 8, 8, 0.5)};

  StudyOptions options;
  options.substeps = 4;
  options.omega_options.grid_density = 12;
  for (int k = 0; k <= 100; ++k)
    options.reference_slice.push_back(Vector::Constant(1, -1.0 + 0.02 * k));

  std::vector<StudyRow> rows = convergence_study(spec, instance, plans, options);
  require(rows.size() == 3, "expected 3 study rows");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(rows[k].error.empty(), "row " + str(k) + ": " + rows[k].error);
    if (k > 0)
      require(rows[k].ref_to_slice <= rows[k - 1].ref_to_slice + 1e-15,
              "directed reference distance increased between rows " + str(k - 1) + " and " + str(k));
    // Independent check: reachable-endpoint dynamic program.
    double expected = directed_to_values(options.reference_slice, reachable_endpoints(plans[k]));
    check_close(rows[k].ref_to_slice, expected, 1e-12, "row " + str(k) + " vs the endpoint oracle");
  }
  require(rows.back().ref_to_slice <= 0.15,
          "final directed distance " + format_double(rows.back().ref_to_slice) + " above 0.15");
}

void criterion_funnel_equivalence() {
  DynamicsSpec spec = catalog_system("integrator");
  ProblemInstance instance = unit_instance();
  DiscretizationPlan plan = DiscretizationPlan::direct(instance, 1.0, 4, 2, 1.0);
  SigmaNet net = build_sigma_net(1, 1.0);
  FunnelCloud euler = build_funnel(build_bundle(spec, instance, plan, net, BundleMode::euler));
  FunnelCloud oracle =
      build_funnel(build_bundle(spec, instance, plan, net, BundleMode::oracle, {}, 32));
  double gap = hausdorff_funnel(euler, oracle).hausdorff;
  require(gap <= 1e-12, "funnel clouds differ by " + format_double(gap));
}

void criterion_metric_axioms() {
  Rng rng(4096);
  auto cloud = [&](int count, int dim) {
    std::vector<Vector> out;
    for (int k = 0; k < count; ++k) out.push_back(uniform_in_ball(rng, dim, 2.0));
    return out;
  };
  for (int trial = 0; trial < 10000; ++trial) {
    int dim = 1 + static_cast<int>(rng() % 3);
    std::vector<Vector> a = cloud(1 + static_cast<int>(rng() % 8), dim);
    std::vector<Vector> b = cloud(1 + static_cast<int>(rng() % 8), dim);
    std::vector<Vector> c = cloud(1 + static_cast<int>(rng() % 8), dim);
    double ab = hausdorff_points(a, b).hausdorff;
    require(ab == hausdorff_points(b, a).hausdorff, "symmetry broken");
    require(hausdorff_points(a, a).hausdorff == 0.0, "identity broken");
    require(ab <= hausdorff_points(a, c).hausdorff + hausdorff_points(c, b).hausdorff + 1e-9,
            "triangle inequality broken");
  }
  for (int count : {1000, 5000, 10000}) {
    std::vector<Vector> a = cloud(count, 2);
    std::vector<Vector> b = cloud(count, 2);
    DistanceReport fast = hausdorff_points(a, b, true);
    DistanceReport brute = hausdorff_points(a, b, false);
    require(fast.hausdorff == brute.hausdorff && fast.directed_ab == brute.directed_ab &&
                fast.directed_ba == brute.directed_ba,
            "accelerated result differs from brute force at " + str(count) + " points");
  }
}

void criterion_net_covering() {
  for (int m : {1, 2, 3}) {
    for (double sigma : {1.0, 0.5, 0.25}) {
      SigmaNet net = build_sigma_net(m, sigma);
      CoveringReport report = covering_check(net, 100000, 314159);
      require(report.pass && report.max_gap <= sigma,
              "m=" + str(m) + " sigma=" + format_double(sigma) + ": gap " +
                  format_double(report.max_gap));
    }
  }
}

void criterion_reproducibility() {
#ifndef FUNNEL_CLI_PATH
  throw Failure("CLI path not configured");
#else
  const fs::path cli(FUNNEL_CLI_PATH);
  const fs::path config = fs::path(FUNNEL_SOURCE_DIR) / "configs" / "demo_integrator.json";
  require(fs::exists(cli), "CLI binary missing: " + cli.string());
  require(fs::exists(config), "demo config missing: " + config.string());

  const fs::path base = fs::temp_directory_path() / "funnel_acceptance_repro";
  fs::remove_all(base);
  fs::create_directories(base);
  for (const char* tag : {"one", "two"}) {
    std::string command = cli.string() + " run --config " + config.string() + " --out " +
                          (base / tag).string() + " > " + (base / tag).string() + ".log 2>&1";
    require(std::system(command.c_str()) == 0, std::string("run failed for ") + tag);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "one")) {
    const fs::path other = base / "two" / entry.path().filename();
    require(fs::exists(other), "missing artifact " + other.string());
    require(read_file(entry.path()) == read_file(other),
            "artifact differs: " + entry.path().filename().string());
    ++compared;
  }
  require(compared >= 4, "expected at least 4 artifacts, compared " + str(compared));
#endif
}

} // namespace

int main() {
  criterion(1, "constant chain exactness", 0.001, criterion_constants);
  criterion(2, "budget fidelity", 1.0, criterion_budget_fidelity);
  criterion(3, "internal approximation", 30.0, criterion_internal_approximation);
  criterion(4, "euler gap bound", 120.0, criterion_euler_gap);
  criterion(5, "trajectory modulus", 60.0, criterion_trajectory_modulus);
  criterion(6, "convergence trend", 120.0, criterion_convergence_trend);
  criterion(7, "funnel equivalence", 10.0, criterion_funnel_equivalence);
  criterion(8, "metric axioms", 60.0, criterion_metric_axioms);
  criterion(9, "net covering", 30.0, criterion_net_covering);
  criterion(10, "reproducibility", 60.0, criterion_reproducibility);

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
