#include "funnel/pipeline.hpp"

#include "funnel/csv.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace funnel {

using nlohmann::json;

void write_net_csv(const std::filesystem::path& path, const SigmaNet& net) {
  CsvWriter csv(path);
  std::vector<std::string> header;
  for (int k = 1; k <= net.dim; ++k) header.push_back("b" + std::to_string(k));
  csv.header(header);
  for (const Vector& b : net.points) {
    std::vector<double> row(b.data(), b.data() + b.size());
    csv.numeric_row(row);
  }
}

void stream_words_csv(std::ostream& out, const DiscretizationPlan& plan, const SigmaNet& net,
                      long cap) {
  out << "word";
  for (int i = 0; i < plan.time_steps; ++i)
    out << ",i" << i << ",j" << i << ",l" << i;
  out << '\n';
  for_each_word(plan, net, cap, [&](long index, const ControlWord& word) {
    out << index;
    for (int i = 0; i < plan.time_steps; ++i)
      out << ',' << i << ',' << word.levels[static_cast<std::size_t>(i)] << ','
          << word.directions[static_cast<std::size_t>(i)];
    out << '\n';
  });
}

void write_words_csv(const std::filesystem::path& path, const DiscretizationPlan& plan,
                     const SigmaNet& net, long cap) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  stream_words_csv(out, plan, net, cap);
}

void write_bundle_csv(const std::filesystem::path& path, const TrajectoryBundle& bundle) {
  CsvWriter csv(path);
  const int n = bundle.size() == 0
                    ? 0
                    : static_cast<int>(bundle.member_at(0, bundle.plan.t0).size());
  std::vector<std::string> header{"word", "t"};
  for (int k = 1; k <= n; ++k) header.push_back("x" + std::to_string(k));
  csv.header(header);
  auto emit = [&](long word, double t, const Vector& x) {
    std::vector<std::string> row{CsvWriter::cell(word), CsvWriter::cell(t)};
    for (int k = 0; k < n; ++k) row.push_back(CsvWriter::cell(x[k]));
    csv.row(row);
  };
  if (bundle.mode == BundleMode::euler) {
    for (const EulerPolyline& line : bundle.lines)
      for (std::size_t i = 0; i < line.nodes.size(); ++i)
        emit(line.word_index, line.grid.node(static_cast<int>(i)), line.nodes[i]);
  } else {
    for (const SampledTrajectory& traj : bundle.samples)
      for (std::size_t i = 0; i < traj.times.size(); ++i)
        emit(traj.word_index, traj.times[i], traj.states[i]);
  }
}

void write_funnel_csv(const std::filesystem::path& path, const FunnelCloud& cloud) {
  CsvWriter csv(path);
  std::vector<std::string> header{"i", "t"};
  for (int k = 1; k <= cloud.state_dim; ++k) header.push_back("x" + std::to_string(k));
  csv.header(header);
  for (std::size_t i = 0; i < cloud.times.size(); ++i) {
    for (const Vector& x : cloud.slices[i]) {
      std::vector<std::string> row{CsvWriter::cell(static_cast<long>(i)),
                                   CsvWriter::cell(cloud.times[i])};
      for (int k = 0; k < cloud.state_dim; ++k) row.push_back(CsvWriter::cell(x[k]));
      csv.row(row);
    }
  }
}

void write_study_csv(const std::filesystem::path& path, const std::vector<StudyRow>& rows) {
  CsvWriter csv(path);
  csv.header({"plan", "N", "q", "sigma", "words", "h_c", "ref_to_bundle", "slice_hn",
              "ref_to_slice", "funnel_hn1", "ref_to_funnel", "omega", "euler_gap_bound",
              "wall_seconds", "error"});
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const StudyRow& row = rows[k];
    csv.row({CsvWriter::cell(static_cast<long>(k)), CsvWriter::cell(static_cast<long>(row.plan.time_steps)),
             CsvWriter::cell(static_cast<long>(row.plan.magnitude_steps)), CsvWriter::cell(row.plan.sigma),
             CsvWriter::cell(row.words), CsvWriter::cell(row.h_c), CsvWriter::cell(row.ref_to_bundle),
             CsvWriter::cell(row.slice_hn), CsvWriter::cell(row.ref_to_slice),
             CsvWriter::cell(row.funnel_hn1), CsvWriter::cell(row.ref_to_funnel),
             CsvWriter::cell(row.omega), CsvWriter::cell(row.euler_gap_bound),
             CsvWriter::cell(row.wall_seconds), row.error.empty() ? "ok" : "capacity"});
  }
}

void write_distance_csv(const std::filesystem::path& path, const std::vector<NamedReport>& reports) {
  CsvWriter csv(path);
  csv.header({"metric", "directed_ab", "directed_ba", "hausdorff", "witness_ab_from",
              "witness_ab_to", "witness_ba_from", "witness_ba_to"});
  for (const NamedReport& named : reports) {
    const DistanceReport& r = named.report;
    csv.row({named.name, CsvWriter::cell(r.directed_ab), CsvWriter::cell(r.directed_ba),
             CsvWriter::cell(r.hausdorff), CsvWriter::cell(r.witness_ab_from),
             CsvWriter::cell(r.witness_ab_to), CsvWriter::cell(r.witness_ba_from),
             CsvWriter::cell(r.witness_ba_to)});
  }
}

std::string describe(const ConstantsChain& chain, const DiscretizationPlan& plan) {
  std::ostringstream out;
  auto line = [&](const char* key, double value) { out << key << " = " << format_double(value) << "\n"; };
  line("alpha_star", chain.trajectory_bound);
  line("l_star", chain.horizon_floor);
  line("c0", chain.growth_exponent);
  line("kappa_star", chain.truncation_constant);
  line("g1", chain.grid_error_gain);
  line("g_beta", chain.lipschitz_gain(plan.beta));
  line("beta", plan.beta);
  out << "N = " << plan.time_steps << "\n";
  line("dt", plan.dt());
  out << "q = " << plan.magnitude_steps << "\n";
  line("delta", plan.magnitude_step());
  line("sigma", plan.sigma);
  line("R_star", plan.lip_radius);
  if (plan.epsilon) line("epsilon", *plan.epsilon);
  return out.str();
}

namespace {

json plan_json(const DiscretizationPlan& plan) {
  json j{{"mode", plan.epsilon ? "epsilon" : "direct"},
         {"t0", plan.t0},
         {"theta", plan.theta},
         {"p", plan.p},
         {"r", plan.r},
         {"beta", plan.beta},
         {"N", plan.time_steps},
         {"q", plan.magnitude_steps},
         {"sigma", plan.sigma},
         {"R_star", plan.lip_radius},
         {"dt", plan.dt()},
         {"delta", plan.magnitude_step()}};
  if (plan.epsilon) j["epsilon"] = *plan.epsilon;
  return j;
}

} // namespace

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ConstantsChain& chain, const DiscretizationPlan& plan,
                    const std::vector<std::string>& files, long net_points, long words,
                    long funnel_points) {
  json j;
  j["system"] = {{"label", config.system.label},
                 {"n", config.system.n},
                 {"m", config.system.m},
                 {"gamma1", config.system.gamma1},
                 {"gamma2", config.system.gamma2},
                 {"gamma3", config.system.gamma3},
                 {"c", config.system.c}};
  j["instance"] = {{"t0", config.instance.t0},
                   {"theta", config.instance.theta},
                   {"p", config.instance.p},
                   {"r", config.instance.r},
                   {"x0", std::vector<double>(config.instance.x0.data(),
                                              config.instance.x0.data() + config.instance.x0.size())}};
  j["chain"] = {{"alpha_star", chain.trajectory_bound},
                {"l_star", chain.horizon_floor},
                {"c0", chain.growth_exponent},
                {"kappa_star", chain.truncation_constant},
                {"g1", chain.grid_error_gain}};
  j["plan"] = plan_json(plan);
  j["counts"] = {{"net_points", net_points}, {"words", words}, {"funnel_points", funnel_points}};
  j["files"] = files;
  j["seed"] = config.seed;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

DiscretizationPlan load_manifest_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ValidationError("manifest parse error: " + std::string(err.what()));
  }
  if (!j.contains("plan")) throw ValidationError("manifest has no plan section");
  const json& p = j.at("plan");
  DiscretizationPlan plan;
  plan.t0 = p.at("t0").get<double>();
  plan.theta = p.at("theta").get<double>();
  plan.p = p.at("p").get<double>();
  plan.r = p.at("r").get<double>();
  plan.beta = p.at("beta").get<double>();
  plan.time_steps = p.at("N").get<int>();
  plan.magnitude_steps = p.at("q").get<int>();
  plan.sigma = p.at("sigma").get<double>();
  plan.lip_radius = p.at("R_star").get<double>();
  if (p.contains("epsilon")) plan.epsilon = p.at("epsilon").get<double>();
  plan.validate();
  return plan;
}

PipelineResult run_pipeline(const RunConfig& config) {
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  const ConstantsChain chain = derive_constants(config.system, config.instance);
  const DiscretizationPlan plan = plan_from_config(config, chain);
  const SigmaNet net = build_sigma_net(config.system.m, plan.sigma, config.caps.max_net_points);

  PipelineResult result;
  result.out_dir = out_dir;
  auto add = [&](const std::string& name) { result.files.push_back(name); };

  write_net_csv(out_dir / "net.csv", net);
  add("net.csv");

  result.words = count_words(plan, net, config.caps.max_words);
  if (config.write_words) {
    write_words_csv(out_dir / "words.csv", plan, net, config.caps.max_words);
    add("words.csv");
  }

  const TrajectoryBundle bundle =
      build_bundle(config.system, config.instance, plan, net, BundleMode::euler, config.caps);
  write_bundle_csv(out_dir / "bundle.csv", bundle);
  add("bundle.csv");

  const FunnelCloud funnel = build_funnel(bundle);
  write_funnel_csv(out_dir / "funnel.csv", funnel);
  add("funnel.csv");

  if (config.with_distance) {
    const TrajectoryBundle oracle = build_bundle(config.system, config.instance, plan, net,
                                                 BundleMode::oracle, config.caps, config.substeps);
    const std::vector<double> grid = default_eval_grid({plan.grid()});
    std::vector<NamedReport> reports;
    reports.push_back({"h_c_euler_vs_oracle", hausdorff_uniform(bundle, oracle, grid)});
    reports.push_back({"slice_hn_theta",
                       hausdorff_points(attainable_slice(bundle, config.instance.theta),
                                        attainable_slice(oracle, config.instance.theta))});
    reports.push_back({"funnel_hn1", hausdorff_funnel(funnel, build_funnel(oracle))});
    write_distance_csv(out_dir / "distance.csv", reports);
    add("distance.csv");
  }

  if (config.study) {
    StudyOptions options;
    options.substeps = config.study->substeps;
    options.reference_slice = config.study->reference_slice;
    options.caps = config.caps;
    options.omega_options = config.omega_options;
    write_study_csv(out_dir / "study.csv", convergence_study(config.system, config.instance,
                                                             study_plans(config), options));
    add("study.csv");
  }

  write_manifest(out_dir / "manifest.json", config, chain, plan, result.files,
                 net.size(), result.words, funnel.total_points());
  result.files.push_back("manifest.json");
  return result;
}

} // namespace funnel
