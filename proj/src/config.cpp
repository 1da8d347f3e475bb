#include "funnel/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace funnel {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
  throw ValidationError("config " + path + ": " + why);
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad_key(path, "expected an object");
  return j;
}

double require_number(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) bad_key(path + "." + key, "missing");
  if (!j.at(key).is_number()) bad_key(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad_key(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

long integer_or(const json& j, const std::string& path, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad_key(path + "." + key, "expected an integer");
  return j.at(key).get<long>();
}

int require_int(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) bad_key(path + "." + key, "missing");
  if (!j.at(key).is_number_integer()) bad_key(path + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

DynamicsSpec parse_system(const json& j) {
  require_object(j, "system");
  if (j.contains("catalog")) {
    if (!j.at("catalog").is_string()) bad_key("system.catalog", "expected a string");
    DynamicsSpec spec = catalog_system(j.at("catalog").get<std::string>());
    // Declared constants may be overridden next to the catalog name.
    spec.gamma1 = number_or(j, "system", "gamma1", spec.gamma1);
    spec.gamma2 = number_or(j, "system", "gamma2", spec.gamma2);
    spec.gamma3 = number_or(j, "system", "gamma3", spec.gamma3);
    spec.c = number_or(j, "system", "c", spec.c);
    return spec;
  }
  int n = require_int(j, "system", "n");
  int m = require_int(j, "system", "m");
  if (!j.contains("rhs") || !j.at("rhs").is_array()) bad_key("system.rhs", "expected an array of expressions");
  std::vector<std::string> sources;
  for (const auto& item : j.at("rhs")) {
    if (!item.is_string()) bad_key("system.rhs", "expected strings");
    sources.push_back(item.get<std::string>());
  }
  std::string label = j.contains("label") && j.at("label").is_string()
                          ? j.at("label").get<std::string>()
                          : std::string("custom");
  return dynamics_from_expressions(std::move(sources), n, m, require_number(j, "system", "gamma1"),
                                   require_number(j, "system", "gamma2"),
                                   require_number(j, "system", "gamma3"),
                                   require_number(j, "system", "c"), std::move(label));
}

ProblemInstance parse_instance(const json& j, int n) {
  require_object(j, "instance");
  ProblemInstance instance;
  instance.t0 = number_or(j, "instance", "t0", 0.0);
  instance.theta = require_number(j, "instance", "theta");
  instance.p = require_number(j, "instance", "p");
  instance.r = require_number(j, "instance", "r");
  if (!j.contains("x0") || !j.at("x0").is_array()) bad_key("instance.x0", "expected an array");
  const auto& x0 = j.at("x0");
  instance.x0.resize(static_cast<Eigen::Index>(x0.size()));
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!x0[i].is_number()) bad_key("instance.x0", "expected numbers");
    instance.x0[static_cast<Eigen::Index>(i)] = x0[i].get<double>();
  }
  instance.validate(n);
  return instance;
}

} // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ValidationError("config parse error: " + std::string(err.what()));
  }
  require_object(j, "(root)");

  RunConfig config;
  if (!j.contains("system")) bad_key("system", "missing");
  config.system = parse_system(j.at("system"));
  if (!j.contains("instance")) bad_key("instance", "missing");
  config.instance = parse_instance(j.at("instance"), config.system.n);

  if (!j.contains("plan")) bad_key("plan", "missing");
  const json& plan = require_object(j.at("plan"), "plan");
  const bool has_epsilon = plan.contains("epsilon");
  const bool has_direct = plan.contains("N") || plan.contains("q") || plan.contains("beta") ||
                          plan.contains("sigma");
  if (has_epsilon && has_direct)
    bad_key("plan", "mode conflict: set either epsilon (with R_star) or beta/N/q/sigma, not both");
  if (!has_epsilon && !has_direct) bad_key("plan", "set either epsilon mode or direct mode fields");
  config.lip_radius = number_or(plan, "plan", "R_star", 1.0);
  if (config.lip_radius <= 0) bad_key("plan.R_star", "must be positive");
  if (has_epsilon) {
    config.epsilon_mode = true;
    config.epsilon = require_number(plan, "plan", "epsilon");
    if (config.epsilon <= 0) bad_key("plan.epsilon", "must be positive");
  } else {
    config.beta = require_number(plan, "plan", "beta");
    config.time_steps = require_int(plan, "plan", "N");
    config.magnitude_steps = require_int(plan, "plan", "q");
    config.sigma = require_number(plan, "plan", "sigma");
  }

  if (j.contains("oracle")) {
    const json& oracle = require_object(j.at("oracle"), "oracle");
    config.substeps = static_cast<int>(integer_or(oracle, "oracle", "substeps", config.substeps));
    if (config.substeps < 1) bad_key("oracle.substeps", "must be >= 1");
  }
  if (j.contains("caps")) {
    const json& caps = require_object(j.at("caps"), "caps");
    config.caps.max_words = integer_or(caps, "caps", "words", config.caps.max_words);
    config.caps.max_net_points = integer_or(caps, "caps", "net_points", config.caps.max_net_points);
    config.caps.max_time_steps =
        static_cast<int>(integer_or(caps, "caps", "N", config.caps.max_time_steps));
    config.caps.max_magnitude_steps =
        static_cast<int>(integer_or(caps, "caps", "q", config.caps.max_magnitude_steps));
  }
  if (j.contains("omega")) {
    const json& omega = require_object(j.at("omega"), "omega");
    config.omega_options.grid_density =
        static_cast<int>(integer_or(omega, "omega", "grid_density", config.omega_options.grid_density));
    config.omega_options.ladder =
        static_cast<int>(integer_or(omega, "omega", "ladder", config.omega_options.ladder));
    config.omega_options.max_evals = integer_or(omega, "omega", "max_evals", config.omega_options.max_evals);
  }
  config.seed = static_cast<std::uint64_t>(integer_or(j, "(root)", "seed", 1));
  if (j.contains("out")) {
    if (!j.at("out").is_string()) bad_key("out", "expected a string");
    config.out_dir = j.at("out").get<std::string>();
  }
  if (j.contains("write_words")) {
    if (!j.at("write_words").is_boolean()) bad_key("write_words", "expected a boolean");
    config.write_words = j.at("write_words").get<bool>();
  }
  if (j.contains("distance")) {
    if (!j.at("distance").is_boolean()) bad_key("distance", "expected a boolean");
    config.with_distance = j.at("distance").get<bool>();
  }
  if (j.contains("study")) {
    const json& study = require_object(j.at("study"), "study");
    StudySpec spec;
    spec.substeps = static_cast<int>(integer_or(study, "study", "substeps", spec.substeps));
    if (!study.contains("plans") || !study.at("plans").is_array() || study.at("plans").empty())
      bad_key("study.plans", "expected a nonempty array");
    for (std::size_t i = 0; i < study.at("plans").size(); ++i) {
      const std::string path = "study.plans[" + std::to_string(i) + "]";
      const json& p = require_object(study.at("plans")[i], path);
      StudyPlanSpec plan_spec;
      plan_spec.time_steps = require_int(p, path, "N");
      plan_spec.magnitude_steps = require_int(p, path, "q");
      plan_spec.sigma = require_number(p, path, "sigma");
      spec.plans.push_back(plan_spec);
    }
    if (study.contains("reference_slice")) {
      if (!study.at("reference_slice").is_array()) bad_key("study.reference_slice", "expected an array");
      for (const auto& row : study.at("reference_slice")) {
        if (!row.is_array()) bad_key("study.reference_slice", "expected arrays of numbers");
        Vector v(static_cast<Eigen::Index>(row.size()));
        for (std::size_t c = 0; c < row.size(); ++c) v[static_cast<Eigen::Index>(c)] = row[c].get<double>();
        spec.reference_slice.push_back(std::move(v));
      }
    }
    config.study = std::move(spec);
  }
  if (config.study && config.epsilon_mode)
    bad_key("study", "requires direct plan mode (the study plans reuse plan.beta)");
  return config;
}

DiscretizationPlan plan_from_config(const RunConfig& config, const ConstantsChain& chain) {
  if (config.epsilon_mode)
    return epsilon_schedule(config.system, chain, config.instance, config.epsilon,
                            config.lip_radius, config.caps, config.omega_options);
  DiscretizationPlan plan =
      DiscretizationPlan::direct(config.instance, config.beta, config.time_steps,
                                 config.magnitude_steps, config.sigma, config.lip_radius);
  return plan;
}

std::vector<DiscretizationPlan> study_plans(const RunConfig& config) {
  if (!config.study) throw ValidationError("config has no study section");
  std::vector<DiscretizationPlan> plans;
  for (const StudyPlanSpec& spec : config.study->plans)
    plans.push_back(DiscretizationPlan::direct(config.instance, config.beta, spec.time_steps,
                                               spec.magnitude_steps, spec.sigma,
                                               config.lip_radius));
  return plans;
}

} // namespace funnel
