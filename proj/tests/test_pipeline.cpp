#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dstyle/csv.hpp"
#include "dstyle/errors.hpp"
#include "dstyle/pipeline.hpp"
#include "test_support.hpp"

using namespace dstyle;

namespace {

std::string slurp(const std::string& path) { return read_text_file(path); }

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

Trajectory straight_line(double v, int n, double dt) {
  Trajectory tr;
  tr.agent_id = "line";
  for (int i = 0; i < n; ++i) tr.samples.push_back({i * dt, v * i * dt, 0.0});
  return tr;
}

}  // namespace

TEST_CASE("config json round trips through parse and render") {
  PipelineConfig cfg = default_config();
  std::string a = config_to_json(cfg);
  PipelineConfig back = config_from_json(a);
  std::string b = config_to_json(back);
  CHECK(a == b);
  CHECK(back.resolution == cfg.resolution);
  CHECK(back.inputs.size() == 4);
  CHECK(back.output.subsets.size() == 3);
  CHECK(back.owa_a == cfg.owa_a);
  CHECK(back.owa_b == cfg.owa_b);
  CHECK(back.clustering.methods == cfg.clustering.methods);
}

TEST_CASE("config parser rejects unknown keys at any level") {
  PipelineConfig cfg = default_config();
  std::string text = config_to_json(cfg);

  auto inject = [&text](const std::string& anchor, const std::string& extra) {
    std::string t = text;
    auto pos = t.find(anchor);
    REQUIRE(pos != std::string::npos);
    t.insert(pos, extra);
    return t;
  };

  std::string top = inject("\"seed\"", "\"surprise\": 1, ");
  try {
    config_from_json(top);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "UnknownKey");
    CHECK(e.exit_code() == 2);
  }

  std::string nested = inject("\"poly_degree\"", "\"wat\": 1, ");
  CHECK_THROWS_AS(config_from_json(nested), ConfigError);

  CHECK_THROWS_AS(config_from_json("{ nope"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1,2]"), ConfigError);
}

TEST_CASE("config validation catches bad field values") {
  PipelineConfig cfg = default_config();
  std::string text = config_to_json(cfg);

  auto swap = [&text](const std::string& from, const std::string& to) {
    std::string t = text;
    auto pos = t.find(from);
    REQUIRE(pos != std::string::npos);
    t.replace(pos, from.size(), to);
    return t;
  };

  CHECK_THROWS_AS(config_from_json(swap("\"filter\": \"savgol\"", "\"filter\": \"kalman2\"")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(swap("\"engine\": \"t2\"", "\"engine\": \"anfis\"")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(swap("\"resolution\": 1000", "\"resolution\": 1")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(swap("\"unit_mode\": \"kmh\"", "\"unit_mode\": \"mph\"")),
                  ConfigError);
  // quantifier must satisfy 0 <= a < b <= 1
  CHECK_THROWS_AS(config_from_json(swap("\"a\": 0.0", "\"a\": 0.9")), ConfigError);

  PipelineConfig ms = config_from_json(swap("\"unit_mode\": \"kmh\"", "\"unit_mode\": \"ms\""));
  CHECK(ms.unit_mode == UnitMode::ms);
}

TEST_CASE("load_config reports missing files as config errors") {
  try {
    load_config("/nonexistent/dir/config.json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "FileNotFound");
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("trajectory csv round trip") {
  testsup::TempDir dir("traj");
  std::vector<Trajectory> trajs;
  trajs.push_back(straight_line(3.0, 12, 0.1));
  trajs.back().agent_id = "a";
  trajs.push_back(straight_line(5.0, 8, 0.1));
  trajs.back().agent_id = "b";

  std::string path = dir.str() + "/t.csv";
  save_trajectories_csv(trajs, path);
  auto back = load_trajectories_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].agent_id == "a");
  CHECK(back[1].agent_id == "b");
  REQUIRE(back[0].samples.size() == 12);
  CHECK(back[0].samples[3].t == doctest::Approx(0.3));
  CHECK(back[0].samples[3].x == doctest::Approx(0.9));
  CHECK(back[1].samples[7].x == doctest::Approx(3.5));
}

TEST_CASE("trajectory csv rejects malformed input") {
  testsup::TempDir dir("trajbad");
  std::string path = dir.str() + "/t.csv";

  write_text_file(path, "agent,time,x,y\n");
  CHECK_THROWS_AS(load_trajectories_csv(path), DataError);

  write_text_file(path, "agent_id,t,x,y\na,0.0,1.0,2.0\na,0.0,1.1,2.0\n");
  try {
    load_trajectories_csv(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "NonUniformSampling");
    CHECK(e.exit_code() == 3);
  }

  write_text_file(path, "agent_id,t,x,y\na,0.0,nan,2.0\n");
  CHECK_THROWS_AS(load_trajectories_csv(path), DataError);

  write_text_file(path, "agent_id,t,x,y\n");
  try {
    load_trajectories_csv(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "EmptySeries");
  }
}

TEST_CASE("extract_all on a constant-speed line") {
  PipelineConfig cfg = default_config();
  cfg.filter = "raw";
  std::vector<Trajectory> trajs{straight_line(10.0, 51, 0.1)};

  auto rows = extract_all(cfg, trajs);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].agent_id == "line");
  CHECK(rows[0].window_index == 0);
  CHECK(rows[0].t_start == doctest::Approx(0.0));
  CHECK(rows[0].filter == "raw");
  CHECK(rows[0].features.mean_velocity == doctest::Approx(36.0).epsilon(1e-9));
  CHECK(rows[0].features.mean_accel == doctest::Approx(0.0));
  CHECK(rows[0].features.mean_decel == doctest::Approx(0.0));
  CHECK(rows[0].features.std_lateral_jerk == doctest::Approx(0.0).epsilon(1e-6));

  cfg.filter = "savgol";
  auto sg = extract_all(cfg, trajs);
  REQUIRE(sg.size() == 1);
  CHECK(sg[0].features.mean_velocity == doctest::Approx(36.0).epsilon(1e-9));

  cfg.unit_mode = UnitMode::ms;
  auto ms = extract_all(cfg, trajs);
  CHECK(ms[0].features.mean_velocity == doctest::Approx(10.0).epsilon(1e-9));

  // two full windows plus remainder from a longer run
  cfg.unit_mode = UnitMode::kmh;
  std::vector<Trajectory> longer{straight_line(10.0, 123, 0.1)};
  auto two = extract_all(cfg, longer);
  REQUIRE(two.size() == 2);
  CHECK(two[0].window_index == 0);
  CHECK(two[1].window_index == 1);
  CHECK(two[1].t_start == doctest::Approx(5.0));
}

TEST_CASE("features csv round trip preserves every digit") {
  std::vector<FeatureRow> rows;
  FeatureRow r;
  r.agent_id = "x_001";
  r.window_index = 2;
  r.t_start = 10.0;
  r.filter = "savgol";
  r.features = {87.123456789012345, 1.0 / 3.0, 0.1 + 0.2, 5e-17};
  rows.push_back(r);

  testsup::TempDir dir("feat");
  std::string path = dir.str() + "/f.csv";
  save_features_csv(rows, path);
  auto back = load_features_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].agent_id == "x_001");
  CHECK(back[0].window_index == 2);
  CHECK(back[0].t_start == 10.0);
  CHECK(back[0].features.mean_velocity == rows[0].features.mean_velocity);
  CHECK(back[0].features.mean_accel == rows[0].features.mean_accel);
  CHECK(back[0].features.mean_decel == rows[0].features.mean_decel);
  CHECK(back[0].features.std_lateral_jerk == rows[0].features.std_lateral_jerk);

  std::string text = slurp(path);
  CHECK(text.rfind("agent_id,window_index,t_start,filter,mean_velocity,mean_acceleration,"
                   "mean_deceleration,std_lateral_jerk\n",
                   0) == 0);
}

TEST_CASE("classification and label csv round trip") {
  PipelineConfig cfg = default_config();
  JudgmentTable j = load_judgments_csv(testsup::data_dir() + "/judgments/experts8.csv", cfg.inputs);
  RuleBase rb = build_rulebase(j, cfg.owa_a, cfg.owa_b, cfg.inputs, cfg.output);
  InferenceEngine engine(std::move(rb), cfg.resolution);

  std::vector<FeatureRow> rows;
  FeatureRow calm;
  calm.agent_id = "c";
  calm.filter = "savgol";
  calm.features = {10.0, 0.5, 0.5, 1.0};
  FeatureRow aggr = calm;
  aggr.agent_id = "a";
  aggr.features = {90.0, 8.0, 8.0, 14.0};
  rows.push_back(calm);
  rows.push_back(aggr);

  auto labels = classify_all(cfg, engine, rows);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].label == "Calm");
  CHECK(labels[1].label == "Aggressive");
  CHECK(labels[0].y_l <= labels[0].y_r);
  CHECK(labels[0].crisp == doctest::Approx(0.5 * (labels[0].y_l + labels[0].y_r)));

  testsup::TempDir dir("lab");
  std::string path = dir.str() + "/l.csv";
  save_labels_csv(labels, path);
  auto back = load_labels_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == "Calm");
  CHECK(back[0].y_l == labels[0].y_l);
  CHECK(back[0].y_r == labels[0].y_r);
  CHECK(back[0].crisp == labels[0].crisp);
  CHECK(back[1].row.features.mean_velocity == 90.0);
}

TEST_CASE("report covers every class, filter and feature") {
  std::vector<LabelRow> rows;
  auto add = [&rows](const std::string& label, double v) {
    LabelRow lr;
    lr.row.filter = "savgol";
    lr.row.features = {v, v / 10.0, v / 20.0, v / 5.0};
    lr.label = label;
    rows.push_back(lr);
  };
  add("Calm", 10.0);
  add("Calm", 12.0);
  add("Aggressive", 90.0);

  std::vector<std::string> order{"Calm", "Moderate", "Aggressive"};
  auto entries = build_report(rows, order);
  // 3 classes x 1 filter x 4 features
  REQUIRE(entries.size() == 12);
  CHECK(entries[0].class_label == "Calm");
  CHECK(entries[0].feature == "mean_velocity");
  CHECK(entries[0].stats.n == 2);
  CHECK(entries[0].stats.mean == doctest::Approx(11.0));

  bool moderate_empty_seen = false;
  for (const auto& e : entries)
    if (e.class_label == "Moderate") {
      CHECK(e.stats.n == 0);
      moderate_empty_seen = true;
    }
  CHECK(moderate_empty_seen);

  std::string csv = report_to_csv(entries);
  CHECK(csv.rfind("class,filter,feature,n,mean,std,min,max,q25,q50,q75,iqr\n", 0) == 0);
  // empty class rows keep the column count with empty cells
  CHECK(csv.find("Moderate,savgol,mean_velocity,0,,,,,,,,\n") != std::string::npos);

  std::string json = report_to_json(entries);
  CHECK(json.find("\"class\": \"Calm\"") != std::string::npos);
  CHECK(json.find("\"mean\"") != std::string::npos);
}

TEST_CASE("cli: validate-config on the shipped default") {
  std::string out, err;
  int rc = run_cli({"validate-config", "--config", testsup::data_dir() + "/default_config.json"},
                   &out, &err);
  CAPTURE(err);
  CHECK(rc == 0);
  CHECK(out.find("config ok") != std::string::npos);
  CHECK(out.find("antecedent combinations: 135") != std::string::npos);
  CHECK(out.find("output subsets: 3") != std::string::npos);
}

TEST_CASE("cli: bad invocations produce structured errors") {
  std::string out, err;

  int rc = run_cli({}, &out, &err);
  CHECK(rc == 2);
  CHECK(err.find("\"code\":\"InvalidArguments\"") != std::string::npos);
  CHECK(err.find("\"kind\":\"config\"") != std::string::npos);

  rc = run_cli({"validate-config"}, &out, &err);
  CHECK(rc == 2);

  rc = run_cli({"validate-config", "--config", "/no/such/file.json"}, &out, &err);
  CHECK(rc == 2);
  CHECK(err.find("\"code\":\"FileNotFound\"") != std::string::npos);

  rc = run_cli({"frobnicate", "--config", "x"}, &out, &err);
  CHECK(rc == 2);

  rc = run_cli({"--help"}, &out, &err);
  CHECK(rc == 0);
  CHECK(out.find("validate-config") != std::string::npos);

  rc = run_cli({"validate-config", "--config", testsup::data_dir() + "/default_config.json",
                "--filter", "boxcar"},
               &out, &err);
  CHECK(rc == 2);
}

TEST_CASE("cli: full chain from judgments to report in a scratch directory") {
  testsup::TempDir dir("chain");
  std::string cfg_path = testsup::data_dir() + "/default_config.json";
  std::string outdir = dir.str() + "/run";
  std::string out, err;

  int rc = run_cli({"build-rulebase", "--config", cfg_path, "--output-dir", outdir, "--judgments",
                    testsup::data_dir() + "/judgments/experts8.csv"},
                   &out, &err);
  CAPTURE(err);
  REQUIRE(rc == 0);
  CHECK(out.find("rules: 135") != std::string::npos);
  CHECK(out.find("experts: 8") != std::string::npos);
  CHECK(std::filesystem::exists(outdir + "/rulebase.csv"));
  CHECK(std::filesystem::exists(outdir + "/rulebase_provenance.json"));

  rc = run_cli({"extract", "--config", cfg_path, "--output-dir", outdir, "--trajectories",
                testsup::data_dir() + "/trajectories/corpus300.csv"},
               &out, &err);
  CAPTURE(err);
  REQUIRE(rc == 0);
  CHECK(out.find("windows: 300") != std::string::npos);
  CHECK(std::filesystem::exists(outdir + "/features.csv"));

  rc = run_cli({"classify", "--config", cfg_path, "--output-dir", outdir}, &out, &err);
  CAPTURE(err);
  REQUIRE(rc == 0);
  CHECK(out.find("engine: t2") != std::string::npos);
  CHECK(std::filesystem::exists(outdir + "/labels.csv"));

  rc = run_cli({"report", "--config", cfg_path, "--output-dir", outdir}, &out, &err);
  CAPTURE(err);
  REQUIRE(rc == 0);
  CHECK(out.find("report rows:") != std::string::npos);
  CHECK(std::filesystem::exists(outdir + "/report.csv"));
  CHECK(std::filesystem::exists(outdir + "/report.json"));

  auto labels = load_labels_csv(outdir + "/labels.csv");
  CHECK(labels.size() == 300);
}

TEST_CASE("cli: clustering emits assignments, models and metrics") {
  testsup::TempDir dir("clust");
  std::string cfg_path = testsup::data_dir() + "/default_config.json";
  std::string outdir = dir.str() + "/run";
  std::string out, err;

  int rc = run_cli({"extract", "--config", cfg_path, "--output-dir", outdir, "--trajectories",
                    testsup::data_dir() + "/trajectories/corpus300.csv"},
                   &out, &err);
  REQUIRE(rc == 0);
  rc = run_cli({"cluster", "--config", cfg_path, "--output-dir", outdir}, &out, &err);
  CAPTURE(err);
  REQUIRE(rc == 0);
  CHECK(out.find("kmeans: silhouette") != std::string::npos);
  for (const char* m : {"kmeans", "gmm", "fcm", "agglomerative"}) {
    CHECK(std::filesystem::exists(outdir + "/cluster_" + m + "_assignments.csv"));
    CHECK(std::filesystem::exists(outdir + "/cluster_" + m + "_model.json"));
  }
  CHECK(std::filesystem::exists(outdir + "/cluster_metrics.csv"));

  std::string metrics = slurp(outdir + "/cluster_metrics.csv");
  CHECK(metrics.rfind("method,silhouette,calinski_harabasz,davies_bouldin\n", 0) == 0);
}

TEST_CASE("cli: seed override changes the config echo, not the outputs' shape") {
  testsup::TempDir dir("seed");
  std::string cfg_path = testsup::data_dir() + "/default_config.json";
  std::string out, err;
  int rc = run_cli({"validate-config", "--config", cfg_path, "--seed", "9"}, &out, &err);
  CHECK(rc == 0);
}
