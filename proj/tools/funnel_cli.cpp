#include "funnel/csv.hpp"
#include "funnel/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using funnel::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string manifest_path;
  long cap = -1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool manifest_option = true) {
  cmd->add_option("--config", args.config_path, "run config JSON")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--cap", args.cap, "word-count cap (overrides config)");
  cmd->add_option("--seed", args.seed, "sampling seed (overrides config)");
  if (manifest_option)
    cmd->add_option("--manifest", args.manifest_path, "reuse the plan from a derive manifest");
}

RunConfig load(const CommonArgs& args) {
  RunConfig config = funnel::parse_config(args.config_path);
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.cap > 0) config.caps.max_words = args.cap;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  return config;
}

// Plan from the manifest when given, otherwise recomputed from the config.
funnel::DiscretizationPlan resolve_plan(const RunConfig& config, const CommonArgs& args) {
  if (!args.manifest_path.empty()) return funnel::load_manifest_plan(args.manifest_path);
  return funnel::plan_from_config(config, funnel::derive_constants(config.system, config.instance));
}

fs::path ensure_out(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

void report_error(const RunConfig* config, int code, const std::string& kind,
                  const std::string& message) {
  nlohmann::json record{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
  std::cerr << record.dump() << "\n";
  if (config) {
    std::error_code ec;
    fs::create_directories(config->out_dir, ec);
    if (!ec) {
      std::ofstream out(fs::path(config->out_dir) / "error.json");
      if (out) out << record.dump(2) << "\n";
    }
  }
}

std::vector<funnel::Vector> load_points(const std::string& path, bool funnel_kind) {
  funnel::CsvTable table = funnel::read_csv(path);
  if (table.rows.empty()) throw funnel::ValidationError("no data rows in " + path);
  // Funnel CSVs carry a leading slice index column; drop it.
  std::size_t skip = funnel_kind && !table.header.empty() && table.header[0] == "i" ? 1 : 0;
  std::vector<funnel::Vector> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t width = table.rows[r].size();
    funnel::Vector v(static_cast<Eigen::Index>(width - skip));
    for (std::size_t k = skip; k < width; ++k)
      v[static_cast<Eigen::Index>(k - skip)] = table.number(r, k);
    points.push_back(std::move(v));
  }
  return points;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite internal approximations of trajectory sets, attainable sets, and integral funnels"};
  app.require_subcommand(1);

  CommonArgs args;
  bool count_only = false;
  std::string mode = "euler";
  std::string file_a, file_b, kind = "points";
  double time_scale = 1.0;

  CLI::App* derive = app.add_subcommand("derive", "print the constants chain and plan; write manifest.json");
  add_common(derive, args, false);
  CLI::App* net = app.add_subcommand("net", "write the sphere net CSV and print a summary");
  add_common(net, args);
  CLI::App* enumerate = app.add_subcommand("enumerate", "stream admissible control words as CSV");
  add_common(enumerate, args);
  enumerate->add_flag("--count-only", count_only, "print the exact word count only");
  CLI::App* bundle = app.add_subcommand("bundle", "build the trajectory bundle CSV");
  add_common(bundle, args);
  bundle->add_option("--mode", mode, "euler|oracle")->check(CLI::IsMember({"euler", "oracle"}));
  CLI::App* funnel_cmd = app.add_subcommand("funnel", "build the funnel point cloud CSV");
  add_common(funnel_cmd, args);
  CLI::App* distance = app.add_subcommand("distance", "Hausdorff distance between two point CSVs");
  distance->add_option("--a", file_a, "first CSV")->required();
  distance->add_option("--b", file_b, "second CSV")->required();
  distance->add_option("--kind", kind, "points|funnel")->check(CLI::IsMember({"points", "funnel"}));
  distance->add_option("--time-scale", time_scale, "weight of the time coordinate (funnel kind)");
  CLI::App* study = app.add_subcommand("study", "run the refinement study and write study.csv");
  add_common(study, args);
  CLI::App* run = app.add_subcommand("run", "full pipeline: net, words, bundle, funnel, extras");
  add_common(run, args, false);

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<RunConfig> config;
  try {
    if (!distance->parsed()) config = std::make_unique<RunConfig>(load(args));

    if (derive->parsed()) {
      const auto chain = funnel::derive_constants(config->system, config->instance);
      const auto plan = funnel::plan_from_config(*config, chain);
      std::cout << funnel::describe(chain, plan);
      const fs::path dir = ensure_out(*config);
      funnel::write_manifest(dir / "manifest.json", *config, chain, plan, {}, 0, 0, 0);
      std::cout << "manifest: " << (dir / "manifest.json").string() << "\n";
    } else if (net->parsed()) {
      const auto plan = resolve_plan(*config, args);
      const auto sigma_net =
          funnel::build_sigma_net(config->system.m, plan.sigma, config->caps.max_net_points);
      const fs::path dir = ensure_out(*config);
      funnel::write_net_csv(dir / "net.csv", sigma_net);
      const auto report = funnel::covering_check(sigma_net, 100000, config->seed);
      std::cout << "m=" << sigma_net.dim << " sigma=" << funnel::format_double(sigma_net.mesh)
                << " points=" << sigma_net.size()
                << " max_gap=" << funnel::format_double(report.max_gap)
                << (report.pass ? " pass" : " FAIL") << "\n";
    } else if (enumerate->parsed()) {
      const auto plan = resolve_plan(*config, args);
      const auto sigma_net =
          funnel::build_sigma_net(config->system.m, plan.sigma, config->caps.max_net_points);
      if (count_only) {
        std::cout << funnel::count_words(plan, sigma_net, config->caps.max_words) << "\n";
      } else if (args.out_dir.empty()) {
        funnel::stream_words_csv(std::cout, plan, sigma_net, config->caps.max_words);
      } else {
        const fs::path dir = ensure_out(*config);
        funnel::write_words_csv(dir / "words.csv", plan, sigma_net, config->caps.max_words);
        std::cout << "words: " << funnel::count_words(plan, sigma_net, config->caps.max_words)
                  << " -> " << (dir / "words.csv").string() << "\n";
      }
    } else if (bundle->parsed()) {
      const auto plan = resolve_plan(*config, args);
      const auto sigma_net =
          funnel::build_sigma_net(config->system.m, plan.sigma, config->caps.max_net_points);
      const auto built = funnel::build_bundle(
          config->system, config->instance, plan, sigma_net,
          mode == "euler" ? funnel::BundleMode::euler : funnel::BundleMode::oracle, config->caps,
          config->substeps);
      const fs::path dir = ensure_out(*config);
      funnel::write_bundle_csv(dir / "bundle.csv", built);
      std::cout << "members: " << built.size() << " -> " << (dir / "bundle.csv").string() << "\n";
    } else if (funnel_cmd->parsed()) {
      const auto chain = funnel::derive_constants(config->system, config->instance);
      const auto plan = args.manifest_path.empty() ? funnel::plan_from_config(*config, chain)
                                                   : funnel::load_manifest_plan(args.manifest_path);
      const auto sigma_net =
          funnel::build_sigma_net(config->system.m, plan.sigma, config->caps.max_net_points);
      const auto built = funnel::build_bundle(config->system, config->instance, plan, sigma_net,
                                              funnel::BundleMode::euler, config->caps);
      const auto cloud = funnel::build_funnel(built);
      const fs::path dir = ensure_out(*config);
      funnel::write_funnel_csv(dir / "funnel.csv", cloud);
      funnel::write_manifest(dir / "manifest.json", *config, chain, plan, {"funnel.csv"},
                             sigma_net.size(), static_cast<long>(built.size()),
                             cloud.total_points());
      std::cout << "funnel points: " << cloud.total_points() << " -> "
                << (dir / "funnel.csv").string() << "\n";
    } else if (distance->parsed()) {
      auto a = load_points(file_a, kind == "funnel");
      auto b = load_points(file_b, kind == "funnel");
      if (kind == "funnel" && time_scale != 1.0) {
        for (auto& v : a) v[0] *= time_scale;
        for (auto& v : b) v[0] *= time_scale;
      }
      const auto report = funnel::hausdorff_points(a, b);
      std::cout << "directed_ab=" << funnel::format_double(report.directed_ab)
                << " directed_ba=" << funnel::format_double(report.directed_ba)
                << " hausdorff=" << funnel::format_double(report.hausdorff)
                << " witness_ab=(" << report.witness_ab_from << "," << report.witness_ab_to << ")"
                << " witness_ba=(" << report.witness_ba_from << "," << report.witness_ba_to << ")\n";
    } else if (study->parsed()) {
      if (!config->study) throw funnel::ValidationError("config has no study section");
      funnel::StudyOptions options;
      options.substeps = config->study->substeps;
      options.reference_slice = config->study->reference_slice;
      options.caps = config->caps;
      options.omega_options = config->omega_options;
      const auto rows = funnel::convergence_study(config->system, config->instance,
                                                  funnel::study_plans(*config), options);
      const fs::path dir = ensure_out(*config);
      funnel::write_study_csv(dir / "study.csv", rows);
      std::cout << "study rows: " << rows.size() << " -> " << (dir / "study.csv").string() << "\n";
    } else if (run->parsed()) {
      const auto result = funnel::run_pipeline(*config);
      std::cout << "wrote " << result.files.size() << " artifacts to " << result.out_dir.string()
                << " (words: " << result.words << ")\n";
    }
  } catch (const funnel::Error& err) {
    const char* kind_name = err.code() == funnel::ErrorCode::capacity     ? "capacity"
                            : err.code() == funnel::ErrorCode::divergence ? "divergence"
                                                                          : "validation";
    report_error(config.get(), err.exit_code(), kind_name, err.what());
    return err.exit_code();
  } catch (const std::exception& err) {
    report_error(config.get(), 1, "validation", err.what());
    return 1;
  }
  return 0;
}
