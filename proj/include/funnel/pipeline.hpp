#pragma once

#include "funnel/bundle.hpp"
#include "funnel/config.hpp"
#include "funnel/metrics.hpp"
#include "funnel/sphere_net.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace funnel {

// Artifact writers shared by the CLI subcommands and the full pipeline.
void write_net_csv(const std::filesystem::path& path, const SigmaNet& net);
void write_words_csv(const std::filesystem::path& path, const DiscretizationPlan& plan,
                     const SigmaNet& net, long cap);
void stream_words_csv(std::ostream& out, const DiscretizationPlan& plan, const SigmaNet& net,
                      long cap);
void write_bundle_csv(const std::filesystem::path& path, const TrajectoryBundle& bundle);
void write_funnel_csv(const std::filesystem::path& path, const FunnelCloud& cloud);
void write_study_csv(const std::filesystem::path& path, const std::vector<StudyRow>& rows);

struct NamedReport {
  std::string name;
  DistanceReport report;
};
void write_distance_csv(const std::filesystem::path& path, const std::vector<NamedReport>& reports);

// Key-value text of the constants chain and plan, as printed by `derive`.
std::string describe(const ConstantsChain& chain, const DiscretizationPlan& plan);

// Serialized chain + plan + counts; consumed by downstream subcommands via
// load_manifest_plan. Deterministic for a fixed config and seed.
void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ConstantsChain& chain, const DiscretizationPlan& plan,
                    const std::vector<std::string>& files, long net_points, long words,
                    long funnel_points);
DiscretizationPlan load_manifest_plan(const std::filesystem::path& path);

struct PipelineResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  long words = 0;
};

// Full run: constants manifest, net CSV, word count, Euler bundle CSV, funnel
// CSV, plus distance / study CSVs when the config requests them. Identical
// config and seed give byte-identical artifacts (study timing column aside).
PipelineResult run_pipeline(const RunConfig& config);

} // namespace funnel
