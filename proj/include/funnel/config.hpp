#pragma once

#include "funnel/common.hpp"
#include "funnel/constants.hpp"
#include "funnel/dynamics.hpp"
#include "funnel/metrics.hpp"
#include "funnel/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace funnel {

struct StudyPlanSpec {
  int time_steps = 1;
  int magnitude_steps = 1;
  double sigma = 1.0;
};

struct StudySpec {
  std::vector<StudyPlanSpec> plans;
  int substeps = 16;
  std::vector<Vector> reference_slice; // optional explicit theta-slice reference
};

// One run: system + instance + discretization (direct or epsilon-driven) +
// output options. Exactly one plan mode may be set.
struct RunConfig {
  DynamicsSpec system;
  ProblemInstance instance;

  bool epsilon_mode = false;
  double epsilon = 0.0;
  double lip_radius = 1.0; // R*

  double beta = 1.0;
  int time_steps = 1;
  int magnitude_steps = 1;
  double sigma = 1.0;

  int substeps = 32;
  Caps caps;
  OmegaOptions omega_options;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  bool write_words = false;
  bool with_distance = false;
  std::optional<StudySpec> study;
};

// Loads and fully validates a JSON run config; missing or ill-typed keys
// raise ValidationError with a path-style diagnostic ("plan.N: ...").
RunConfig parse_config(const std::string& path);

// The plan the config describes: direct fields, or the epsilon schedule.
DiscretizationPlan plan_from_config(const RunConfig& config, const ConstantsChain& chain);

std::vector<DiscretizationPlan> study_plans(const RunConfig& config);

} // namespace funnel
