#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dstyle/clustering.hpp"
#include "dstyle/experts.hpp"
#include "dstyle/features.hpp"
#include "dstyle/filters.hpp"
#include "dstyle/mamdani.hpp"
#include "dstyle/stats.hpp"

namespace dstyle {

struct PathConfig {
  std::string trajectories;
  std::string judgments;
  std::string rulebase;
  std::string features;
  std::string labels;
  std::string output_dir = "out";
};

struct ClusteringConfig {
  ClusterOptions options;
  std::vector<ClusterMethod> methods = {ClusterMethod::kmeans, ClusterMethod::gmm,
                                        ClusterMethod::fcm, ClusterMethod::agglomerative};
};

struct PipelineConfig {
  unsigned long seed = 1;
  int resolution = kDefaultResolution;
  double window_seconds = 5.0;
  UnitMode unit_mode = UnitMode::kmh;
  std::string filter = "savgol";  // savgol | ekf | raw
  std::string engine = "t2";      // t2 | t1
  SgConfig savgol;
  EkfConfig ekf;
  double owa_a = 0.0;
  double owa_b = 0.5;
  ClusteringConfig clustering;
  PathConfig paths;
  std::vector<LinguisticVariable> inputs;
  LinguisticVariable output;

  PipelineConfig();  // built-in defaults, including the standard partitions
};

PipelineConfig default_config();
PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

// Trajectory CSV with header agent_id,t,x,y; rows grouped by agent, strictly
// increasing t within each agent.
std::vector<Trajectory> load_trajectories_csv(const std::string& path);
void save_trajectories_csv(std::span<const Trajectory> trajs, const std::string& path);

struct FeatureRow {
  std::string agent_id;
  int window_index = 0;
  double t_start = 0.0;
  std::string filter;
  FeatureVector features;
};

// Filter each trajectory per the config, derive kinematics, slice windows,
// extract one feature vector per window.
std::vector<FeatureRow> extract_all(const PipelineConfig& cfg, std::span<const Trajectory> trajs);
void save_features_csv(std::span<const FeatureRow> rows, const std::string& path);
std::vector<FeatureRow> load_features_csv(const std::string& path);

struct LabelRow {
  FeatureRow row;
  double y_l = 0.0;
  double y_r = 0.0;
  double crisp = 0.0;
  std::string label;
};

std::vector<LabelRow> classify_all(const PipelineConfig& cfg, const InferenceEngine& engine,
                                   std::span<const FeatureRow> rows);
void save_labels_csv(std::span<const LabelRow> rows, const std::string& path);
std::vector<LabelRow> load_labels_csv(const std::string& path);

struct ReportEntry {
  std::string class_label;
  std::string filter;
  std::string feature;
  DescriptiveSummary stats;
};

std::vector<ReportEntry> build_report(std::span<const LabelRow> rows,
                                      std::span<const std::string> class_order);
std::string report_to_csv(std::span<const ReportEntry> entries);
std::string report_to_json(std::span<const ReportEntry> entries);

// Entry point behind the CLI binary. args excludes the program name.
// Subcommands: validate-config, build-rulebase, extract, classify, cluster,
// report. Errors land on `err` as one JSON object; the return value is the
// process exit code (0 ok, 2 config, 3 data, 4 numeric).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dstyle
