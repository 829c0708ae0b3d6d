#include "dstyle/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "dstyle/csv.hpp"
#include "dstyle/errors.hpp"

namespace dstyle {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

It2TrapezoidSet make_set(const char* name, std::array<double, 5> u, std::array<double, 5> l) {
  return It2TrapezoidSet(name, TrapezoidParams(u[0], u[1], u[2], u[3], u[4]),
                         TrapezoidParams(l[0], l[1], l[2], l[3], l[4]));
}

std::vector<It2TrapezoidSet> accel_partition() {
  return {make_set("Small", {0, 0, 2, 3.5, 1}, {0, 0, 1.5, 2.7, 0.8}),
          make_set("Medium", {2, 3.5, 5.5, 7, 1}, {2.7, 4, 5, 6.2, 0.8}),
          make_set("Large", {5.5, 7, 10, 10, 1}, {6.2, 7.5, 10, 10, 0.8})};
}

std::vector<LinguisticVariable> default_inputs() {
  std::vector<LinguisticVariable> vars;
  vars.emplace_back("mean_velocity", "km/h", 0.0, 100.0,
                    std::vector<It2TrapezoidSet>{
                        make_set("Very Slow", {0, 0, 15, 25, 1}, {0, 0, 12, 20, 0.8}),
                        make_set("Slow", {15, 25, 35, 45, 1}, {20, 28, 32, 40, 0.8}),
                        make_set("Normal", {35, 45, 55, 65, 1}, {40, 48, 52, 60, 0.8}),
                        make_set("Fast", {55, 65, 75, 85, 1}, {60, 68, 72, 80, 0.8}),
                        make_set("Very Fast", {75, 85, 100, 100, 1}, {80, 88, 100, 100, 0.8})});
  vars.emplace_back("mean_acceleration", "m/s^2", 0.0, 10.0, accel_partition());
  vars.emplace_back("mean_deceleration", "m/s^2", 0.0, 10.0, accel_partition());
  vars.emplace_back("std_lateral_jerk", "m/s^3", 0.0, 16.0,
                    std::vector<It2TrapezoidSet>{
                        make_set("Small", {0, 0, 4, 6, 1}, {0, 0, 3, 4.5, 0.8}),
                        make_set("Medium", {3, 6, 10, 12.9, 1}, {4.5, 6.9, 9.1, 11.4, 0.8}),
                        make_set("Large", {10, 12, 16, 16, 1}, {11.5, 13, 16, 16, 0.8})});
  return vars;
}

LinguisticVariable default_output() {
  return LinguisticVariable(
      "driving_style", "", 0.0, 1.0,
      std::vector<It2TrapezoidSet>{
          make_set("Calm", {0, 0, 0.2, 0.4, 1}, {0, 0, 0.15, 0.3, 0.8}),
          make_set("Moderate", {0.2, 0.4, 0.6, 0.8, 1}, {0.3, 0.45, 0.55, 0.7, 0.8}),
          make_set("Aggressive", {0.6, 0.8, 1, 1, 1}, {0.7, 0.85, 1, 1, 0.8})});
}

}  // namespace

PipelineConfig::PipelineConfig() : inputs(default_inputs()), output(default_output()) {}

PipelineConfig default_config() { return PipelineConfig(); }

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError("InvalidConfig", where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("UnknownKey", "unknown key '" + it.key() + "' in " + where);
  }
}

TrapezoidParams trapezoid_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 5)
    throw ConfigError("InvalidTrapezoid", where + " must be [a1, a2, a3, a4, height]");
  return TrapezoidParams(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                         j[3].get<double>(), j[4].get<double>());
}

json trapezoid_to_json(const TrapezoidParams& p) {
  return json::array({p.a1, p.a2, p.a3, p.a4, p.height});
}

LinguisticVariable variable_from_json(const json& j, const std::string& where) {
  check_keys(j, {"name", "unit", "universe", "subsets"}, where);
  std::string name = j.at("name").get<std::string>();
  std::string unit = j.value("unit", "");
  const json& uni = j.at("universe");
  if (!uni.is_array() || uni.size() != 2)
    throw ConfigError("InvalidVariable", where + ": universe must be [lo, hi]");
  std::vector<It2TrapezoidSet> subsets;
  for (const json& s : j.at("subsets")) {
    check_keys(s, {"name", "upper", "lower"}, where + " subset");
    subsets.emplace_back(s.at("name").get<std::string>(),
                         trapezoid_from_json(s.at("upper"), where + " upper"),
                         trapezoid_from_json(s.at("lower"), where + " lower"));
  }
  return LinguisticVariable(std::move(name), std::move(unit), uni[0].get<double>(),
                            uni[1].get<double>(), std::move(subsets));
}

ordered_json variable_to_json(const LinguisticVariable& v) {
  ordered_json out;
  out["name"] = v.name;
  out["unit"] = v.unit;
  out["universe"] = json::array({v.lo, v.hi});
  out["subsets"] = ordered_json::array();
  for (const auto& s : v.subsets) {
    ordered_json js;
    js["name"] = s.name;
    js["upper"] = trapezoid_to_json(s.upper);
    js["lower"] = trapezoid_to_json(s.lower);
    out["subsets"].push_back(js);
  }
  return out;
}

const std::set<std::string>& valid_filters() {
  static const std::set<std::string> f{"savgol", "ekf", "raw"};
  return f;
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.resolution < 2) throw ConfigError("InvalidResolution", "resolution must be >= 2");
  if (!(cfg.window_seconds > 0)) throw ConfigError("InvalidWindow", "window_seconds must be positive");
  if (!valid_filters().count(cfg.filter))
    throw ConfigError("InvalidFilter", "filter must be savgol, ekf or raw");
  if (cfg.engine != "t2" && cfg.engine != "t1")
    throw ConfigError("InvalidEngine", "engine must be t2 or t1");
  if (cfg.savgol.poly_degree < 1 || cfg.savgol.window_len % 2 == 0 ||
      cfg.savgol.window_len <= cfg.savgol.poly_degree)
    throw ConfigError("InvalidFilter", "savgol window must be odd and exceed the degree");
  if (!(cfg.ekf.sigma_accel > 0 && cfg.ekf.sigma_yaw_accel > 0 && cfg.ekf.sigma_pos > 0 &&
        cfg.ekf.init_cov_scale > 0))
    throw ConfigError("InvalidFilter", "ekf noise parameters must be positive");
  owa_weights(2, cfg.owa_a, cfg.owa_b);  // validates the quantifier parameters
  if (cfg.inputs.size() != 4)
    throw ConfigError("InvalidVariable", "expected 4 input variables");
  if (cfg.output.subsets.size() < 2)
    throw ConfigError("InvalidVariable", "output needs at least two subsets");
  const auto& co = cfg.clustering.options;
  if (co.k < 2) throw ConfigError("InvalidK", "clustering k must be >= 2");
  if (co.restarts < 1) throw ConfigError("InvalidK", "restarts must be >= 1");
  if (!(co.fuzzifier > 1.0)) throw ConfigError("InvalidK", "fuzzifier must exceed 1");
  if (co.max_iter < 1) throw ConfigError("InvalidK", "max_iter must be >= 1");
  if (!(co.tol > 0)) throw ConfigError("InvalidK", "tol must be positive");
  if (cfg.clustering.methods.empty())
    throw ConfigError("InvalidMethod", "clustering needs at least one method");
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("InvalidConfig", std::string("config is not valid JSON: ") + e.what());
  }

  PipelineConfig cfg;
  try {
    check_keys(doc,
               {"seed", "resolution", "window_seconds", "unit_mode", "filter", "engine", "savgol",
                "ekf", "owa", "clustering", "paths", "variables"},
               "config");
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.resolution = doc.value("resolution", cfg.resolution);
    cfg.window_seconds = doc.value("window_seconds", cfg.window_seconds);
    if (doc.contains("unit_mode")) {
      std::string u = doc["unit_mode"].get<std::string>();
      if (u == "kmh") cfg.unit_mode = UnitMode::kmh;
      else if (u == "ms") cfg.unit_mode = UnitMode::ms;
      else throw ConfigError("InvalidConfig", "unit_mode must be kmh or ms");
    }
    cfg.filter = doc.value("filter", cfg.filter);
    cfg.engine = doc.value("engine", cfg.engine);
    if (doc.contains("savgol")) {
      const json& j = doc["savgol"];
      check_keys(j, {"poly_degree", "window_len"}, "savgol");
      cfg.savgol.poly_degree = j.value("poly_degree", cfg.savgol.poly_degree);
      cfg.savgol.window_len = j.value("window_len", cfg.savgol.window_len);
    }
    if (doc.contains("ekf")) {
      const json& j = doc["ekf"];
      check_keys(j, {"sigma_accel", "sigma_yaw_accel", "sigma_pos", "init_cov_scale"}, "ekf");
      cfg.ekf.sigma_accel = j.value("sigma_accel", cfg.ekf.sigma_accel);
      cfg.ekf.sigma_yaw_accel = j.value("sigma_yaw_accel", cfg.ekf.sigma_yaw_accel);
      cfg.ekf.sigma_pos = j.value("sigma_pos", cfg.ekf.sigma_pos);
      cfg.ekf.init_cov_scale = j.value("init_cov_scale", cfg.ekf.init_cov_scale);
    }
    if (doc.contains("owa")) {
      const json& j = doc["owa"];
      check_keys(j, {"a", "b"}, "owa");
      cfg.owa_a = j.value("a", cfg.owa_a);
      cfg.owa_b = j.value("b", cfg.owa_b);
    }
    if (doc.contains("clustering")) {
      const json& j = doc["clustering"];
      check_keys(j, {"k", "standardize", "max_iter", "tol", "restarts", "fuzzifier", "methods"},
                 "clustering");
      auto& co = cfg.clustering.options;
      co.k = j.value("k", co.k);
      co.standardize = j.value("standardize", co.standardize);
      co.max_iter = j.value("max_iter", co.max_iter);
      co.tol = j.value("tol", co.tol);
      co.restarts = j.value("restarts", co.restarts);
      co.fuzzifier = j.value("fuzzifier", co.fuzzifier);
      if (j.contains("methods")) {
        cfg.clustering.methods.clear();
        for (const json& m : j["methods"])
          cfg.clustering.methods.push_back(cluster_method_from_string(m.get<std::string>()));
      }
    }
    if (doc.contains("paths")) {
      const json& j = doc["paths"];
      check_keys(j, {"trajectories", "judgments", "rulebase", "features", "labels", "output_dir"},
                 "paths");
      cfg.paths.trajectories = j.value("trajectories", cfg.paths.trajectories);
      cfg.paths.judgments = j.value("judgments", cfg.paths.judgments);
      cfg.paths.rulebase = j.value("rulebase", cfg.paths.rulebase);
      cfg.paths.features = j.value("features", cfg.paths.features);
      cfg.paths.labels = j.value("labels", cfg.paths.labels);
      cfg.paths.output_dir = j.value("output_dir", cfg.paths.output_dir);
    }
    if (doc.contains("variables")) {
      const json& j = doc["variables"];
      check_keys(j, {"inputs", "output"}, "variables");
      if (j.contains("inputs")) {
        cfg.inputs.clear();
        for (const json& v : j["inputs"]) cfg.inputs.push_back(variable_from_json(v, "input variable"));
      }
      if (j.contains("output")) cfg.output = variable_from_json(j["output"], "output variable");
    }
  } catch (const json::exception& e) {
    throw ConfigError("InvalidConfig", std::string("config field error: ") + e.what());
  }

  cfg.clustering.options.seed = cfg.seed;
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  ordered_json doc;
  doc["seed"] = cfg.seed;
  doc["resolution"] = cfg.resolution;
  doc["window_seconds"] = cfg.window_seconds;
  doc["unit_mode"] = cfg.unit_mode == UnitMode::kmh ? "kmh" : "ms";
  doc["filter"] = cfg.filter;
  doc["engine"] = cfg.engine;
  doc["savgol"] = {{"poly_degree", cfg.savgol.poly_degree}, {"window_len", cfg.savgol.window_len}};
  doc["ekf"] = {{"sigma_accel", cfg.ekf.sigma_accel},
                {"sigma_yaw_accel", cfg.ekf.sigma_yaw_accel},
                {"sigma_pos", cfg.ekf.sigma_pos},
                {"init_cov_scale", cfg.ekf.init_cov_scale}};
  doc["owa"] = {{"a", cfg.owa_a}, {"b", cfg.owa_b}};
  ordered_json methods = ordered_json::array();
  for (auto m : cfg.clustering.methods) methods.push_back(to_string(m));
  doc["clustering"] = {{"k", cfg.clustering.options.k},
                       {"standardize", cfg.clustering.options.standardize},
                       {"max_iter", cfg.clustering.options.max_iter},
                       {"tol", cfg.clustering.options.tol},
                       {"restarts", cfg.clustering.options.restarts},
                       {"fuzzifier", cfg.clustering.options.fuzzifier},
                       {"methods", methods}};
  doc["paths"] = {{"trajectories", cfg.paths.trajectories}, {"judgments", cfg.paths.judgments},
                  {"rulebase", cfg.paths.rulebase},         {"features", cfg.paths.features},
                  {"labels", cfg.paths.labels},             {"output_dir", cfg.paths.output_dir}};
  ordered_json inputs = ordered_json::array();
  for (const auto& v : cfg.inputs) inputs.push_back(variable_to_json(v));
  doc["variables"] = {{"inputs", inputs}, {"output", variable_to_json(cfg.output)}};
  return doc.dump(2) + "\n";
}

PipelineConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError("FileNotFound", e.what());
  }
  return config_from_json(text);
}

std::vector<Trajectory> load_trajectories_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  const std::vector<std::string> want{"agent_id", "t", "x", "y"};
  if (t.header != want)
    throw DataError("MalformedCsv", path + ": expected header agent_id,t,x,y");

  std::vector<Trajectory> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : t.rows) {
    const std::string& id = row[0];
    auto [it, fresh] = index.try_emplace(id, out.size());
    if (fresh) out.push_back(Trajectory{id, {}});
    TrajectorySample s{parse_double(row[1], path), parse_double(row[2], path),
                       parse_double(row[3], path)};
    if (!(std::isfinite(s.t) && std::isfinite(s.x) && std::isfinite(s.y)))
      throw DataError("NonFiniteInput", path + ": non-finite sample for agent " + id);
    auto& samples = out[it->second].samples;
    if (!samples.empty() && !(s.t > samples.back().t))
      throw DataError("NonUniformSampling",
                      path + ": timestamps must strictly increase for agent " + id);
    samples.push_back(s);
  }
  if (out.empty()) throw DataError("EmptySeries", path + ": no trajectory rows");
  return out;
}

void save_trajectories_csv(std::span<const Trajectory> trajs, const std::string& path) {
  std::string text = "agent_id,t,x,y\n";
  for (const auto& tr : trajs)
    for (const auto& s : tr.samples)
      text += csv_join({tr.agent_id, format_double(s.t), format_double(s.x),
                        format_double(s.y)}) +
              "\n";
  write_text_file(path, text);
}

namespace {

const std::vector<std::string>& feature_header() {
  static const std::vector<std::string> h{"agent_id",       "window_index",
                                          "t_start",        "filter",
                                          "mean_velocity",  "mean_acceleration",
                                          "mean_deceleration", "std_lateral_jerk"};
  return h;
}

const std::array<const char*, 4>& feature_names() {
  static const std::array<const char*, 4> n{"mean_velocity", "mean_acceleration",
                                            "mean_deceleration", "std_lateral_jerk"};
  return n;
}

std::vector<std::string> feature_row_fields(const FeatureRow& r) {
  return {r.agent_id,
          std::to_string(r.window_index),
          format_double(r.t_start),
          r.filter,
          format_double(r.features.mean_velocity),
          format_double(r.features.mean_accel),
          format_double(r.features.mean_decel),
          format_double(r.features.std_lateral_jerk)};
}

std::string features_to_csv(std::span<const FeatureRow> rows) {
  std::string text = csv_join(feature_header()) + "\n";
  for (const auto& r : rows) text += csv_join(feature_row_fields(r)) + "\n";
  return text;
}

FeatureRow feature_row_from_fields(const std::vector<std::string>& row, const std::string& path) {
  FeatureRow r;
  r.agent_id = row[0];
  r.window_index = static_cast<int>(parse_long(row[1], path));
  r.t_start = parse_double(row[2], path);
  r.filter = row[3];
  r.features.mean_velocity = parse_double(row[4], path);
  r.features.mean_accel = parse_double(row[5], path);
  r.features.mean_decel = parse_double(row[6], path);
  r.features.std_lateral_jerk = parse_double(row[7], path);
  return r;
}

std::string labels_to_csv(std::span<const LabelRow> rows) {
  std::vector<std::string> header = feature_header();
  header.insert(header.end(), {"y_l", "y_r", "crisp", "label"});
  std::string text = csv_join(header) + "\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields = feature_row_fields(r.row);
    fields.push_back(format_double(r.y_l));
    fields.push_back(format_double(r.y_r));
    fields.push_back(format_double(r.crisp));
    fields.push_back(r.label);
    text += csv_join(fields) + "\n";
  }
  return text;
}

}  // namespace

std::vector<FeatureRow> extract_all(const PipelineConfig& cfg, std::span<const Trajectory> trajs) {
  std::vector<FeatureRow> rows;
  for (const auto& traj : trajs) {
    double dt = uniform_dt(traj.samples);
    KinematicSeries ks;
    if (cfg.filter == "savgol") {
      Trajectory smooth = sg_smooth(traj, cfg.savgol);
      ks = kinematics_from_trajectory(std::span<const TrajectorySample>(smooth.samples), dt);
    } else if (cfg.filter == "ekf") {
      EkfResult r = ekf_smooth(traj, cfg.ekf);
      ks = kinematics_from_trajectory(std::span<const KinematicState>(r.states), dt);
    } else if (cfg.filter == "raw") {
      ks = kinematics_from_trajectory(std::span<const TrajectorySample>(traj.samples), dt);
    } else {
      throw ConfigError("InvalidFilter", "filter must be savgol, ekf or raw");
    }
    int w = 0;
    for (const auto& win : split_windows(ks, cfg.window_seconds)) {
      FeatureRow row;
      row.agent_id = traj.agent_id;
      row.window_index = w++;
      row.t_start = win.t.front();
      row.filter = cfg.filter;
      row.features = extract_features(win, cfg.window_seconds, cfg.unit_mode);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void save_features_csv(std::span<const FeatureRow> rows, const std::string& path) {
  write_text_file(path, features_to_csv(rows));
}

std::vector<FeatureRow> load_features_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header != feature_header())
    throw DataError("MalformedCsv", path + ": unexpected feature header");
  std::vector<FeatureRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& row : t.rows) rows.push_back(feature_row_from_fields(row, path));
  return rows;
}

std::vector<LabelRow> classify_all(const PipelineConfig& cfg, const InferenceEngine& engine,
                                   std::span<const FeatureRow> rows) {
  std::vector<LabelRow> out;
  out.reserve(rows.size());
  const auto& output = engine.rulebase().output;
  for (const auto& r : rows) {
    InferenceResult res =
        cfg.engine == "t1" ? engine.infer_t1(r.features) : engine.infer_t2(r.features);
    LabelRow lr;
    lr.row = r;
    lr.y_l = res.reduced.lo;
    lr.y_r = res.reduced.hi;
    lr.crisp = res.crisp;
    lr.label = output.subsets[res.label].name;
    out.push_back(std::move(lr));
  }
  return out;
}

void save_labels_csv(std::span<const LabelRow> rows, const std::string& path) {
  write_text_file(path, labels_to_csv(rows));
}

std::vector<LabelRow> load_labels_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  std::vector<std::string> want = feature_header();
  want.insert(want.end(), {"y_l", "y_r", "crisp", "label"});
  if (t.header != want) throw DataError("MalformedCsv", path + ": unexpected label header");
  std::vector<LabelRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    LabelRow lr;
    lr.row = feature_row_from_fields(row, path);
    lr.y_l = parse_double(row[8], path);
    lr.y_r = parse_double(row[9], path);
    lr.crisp = parse_double(row[10], path);
    lr.label = row[11];
    rows.push_back(std::move(lr));
  }
  return rows;
}

std::vector<ReportEntry> build_report(std::span<const LabelRow> rows,
                                      std::span<const std::string> class_order) {
  std::vector<std::string> filters;
  for (const auto& r : rows)
    if (std::find(filters.begin(), filters.end(), r.row.filter) == filters.end())
      filters.push_back(r.row.filter);
  std::sort(filters.begin(), filters.end());

  std::vector<ReportEntry> entries;
  for (const auto& cls : class_order) {
    for (const auto& flt : filters) {
      std::array<std::vector<double>, 4> cols;
      for (const auto& r : rows) {
        if (r.label != cls || r.row.filter != flt) continue;
        auto vals = r.row.features.to_array();
        for (int j = 0; j < 4; ++j) cols[j].push_back(vals[j]);
      }
      for (int j = 0; j < 4; ++j) {
        ReportEntry e;
        e.class_label = cls;
        e.filter = flt;
        e.feature = feature_names()[j];
        if (!cols[j].empty()) e.stats = describe(cols[j]);
        entries.push_back(std::move(e));
      }
    }
  }
  return entries;
}

std::string report_to_csv(std::span<const ReportEntry> entries) {
  std::string text = "class,filter,feature,n,mean,std,min,max,q25,q50,q75,iqr\n";
  for (const auto& e : entries) {
    std::vector<std::string> fields{e.class_label, e.filter, e.feature,
                                    std::to_string(e.stats.n)};
    if (e.stats.n == 0) {
      fields.insert(fields.end(), 8, "");
    } else {
      for (double v : {e.stats.mean, e.stats.stddev, e.stats.min, e.stats.max, e.stats.q25,
                       e.stats.q50, e.stats.q75, e.stats.iqr})
        fields.push_back(format_double(v));
    }
    text += csv_join(fields) + "\n";
  }
  return text;
}

std::string report_to_json(std::span<const ReportEntry> entries) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json o;
    o["class"] = e.class_label;
    o["filter"] = e.filter;
    o["feature"] = e.feature;
    o["n"] = e.stats.n;
    if (e.stats.n > 0) {
      o["stats"] = {{"mean", e.stats.mean}, {"std", e.stats.stddev}, {"min", e.stats.min},
                    {"max", e.stats.max},   {"q25", e.stats.q25},    {"q50", e.stats.q50},
                    {"q75", e.stats.q75},   {"iqr", e.stats.iqr}};
    }
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

namespace {

// Staged output: everything is rendered in memory first, then written through
// temp files. A failure removes whatever was already placed so a subcommand
// never leaves partial outputs behind.
class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }

  void commit() {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    std::vector<fs::path> placed;
    try {
      for (const auto& [name, content] : files_) {
        fs::path tmp = fs::path(dir_) / (name + ".tmp");
        write_text_file(tmp.string(), content);
        placed.push_back(tmp);
        fs::path final = fs::path(dir_) / name;
        fs::rename(tmp, final);
        placed.back() = final;
      }
    } catch (...) {
      for (const auto& p : placed) {
        std::error_code ignore;
        fs::remove(p, ignore);
      }
      throw;
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string pick_path(const std::string& flag, const std::string& configured,
                      const std::string& fallback, const char* what) {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  if (!fallback.empty()) return fallback;
  throw ConfigError("MissingPath", std::string("no ") + what + " path given");
}

struct CliOptions {
  std::string config;
  std::string output_dir;
  std::string trajectories;
  std::string judgments;
  std::string rulebase;
  std::string features;
  std::string labels;
  std::string filter;
  std::string engine;
  std::string unit_mode;
  long long seed = -1;
  double window_seconds = -1.0;
  int resolution = -1;
};

void apply_overrides(PipelineConfig& cfg, const CliOptions& o) {
  if (!o.output_dir.empty()) {
    cfg.paths.output_dir = o.output_dir;
  } else if (const char* env = std::getenv("DSTYLE_OUTPUT_DIR"); env && *env) {
    cfg.paths.output_dir = env;
  }
  if (!o.filter.empty()) cfg.filter = o.filter;
  if (!o.engine.empty()) cfg.engine = o.engine;
  if (!o.unit_mode.empty()) {
    if (o.unit_mode == "kmh") cfg.unit_mode = UnitMode::kmh;
    else if (o.unit_mode == "ms") cfg.unit_mode = UnitMode::ms;
    else throw ConfigError("InvalidConfig", "unit_mode must be kmh or ms");
  }
  if (o.seed >= 0) {
    cfg.seed = static_cast<unsigned long>(o.seed);
    cfg.clustering.options.seed = cfg.seed;
  }
  if (o.window_seconds > 0) cfg.window_seconds = o.window_seconds;
  if (o.resolution > 0) cfg.resolution = o.resolution;
  validate_config(cfg);
}

int run_validate(const PipelineConfig& cfg, std::ostream& out) {
  out << "config ok\n";
  out << "input variables:";
  for (const auto& v : cfg.inputs) out << " " << v.name << "(" << v.subsets.size() << ")";
  out << "\n";
  out << "antecedent combinations: " << combination_count(cfg.inputs) << "\n";
  out << "output subsets: " << cfg.output.subsets.size() << "\n";
  out << "quantifier: a=" << format_double(cfg.owa_a) << " b=" << format_double(cfg.owa_b) << "\n";
  return 0;
}

int run_build_rulebase(const PipelineConfig& cfg, const CliOptions& o, std::ostream& out) {
  std::string path = pick_path(o.judgments, cfg.paths.judgments, "", "judgments");
  JudgmentTable jt = load_judgments_csv(path, cfg.inputs);
  std::vector<RuleProvenance> prov;
  RuleBase rb = build_rulebase(jt, cfg.owa_a, cfg.owa_b, cfg.inputs, cfg.output, &prov);

  OutputSet os(cfg.paths.output_dir);
  os.add("rulebase.csv", rulebase_to_csv(rb));
  os.add("rulebase_provenance.json", provenance_to_json(rb, prov));
  os.commit();

  std::vector<std::size_t> counts(cfg.output.subsets.size(), 0);
  for (const auto& r : rb.rules) counts[r.consequent]++;
  out << "rules: " << rb.rules.size();
  for (std::size_t i = 0; i < counts.size(); ++i)
    out << (i ? ", " : " (") << cfg.output.subsets[i].name << " " << counts[i];
  out << ")\n";
  out << "experts: " << jt.expert_count << "\n";
  return 0;
}

int run_extract(const PipelineConfig& cfg, const CliOptions& o, std::ostream& out) {
  std::string path = pick_path(o.trajectories, cfg.paths.trajectories, "", "trajectories");
  std::vector<Trajectory> trajs = load_trajectories_csv(path);
  std::vector<FeatureRow> rows = extract_all(cfg, trajs);

  OutputSet os(cfg.paths.output_dir);
  os.add("features.csv", features_to_csv(rows));
  os.commit();

  out << "agents: " << trajs.size() << "\n";
  out << "windows: " << rows.size() << "\n";
  return 0;
}

int run_classify(const PipelineConfig& cfg, const CliOptions& o, std::ostream& out) {
  std::string features = pick_path(o.features, cfg.paths.features,
                                   cfg.paths.output_dir + "/features.csv", "features");
  std::string rulebase = pick_path(o.rulebase, cfg.paths.rulebase,
                                   cfg.paths.output_dir + "/rulebase.csv", "rulebase");
  std::vector<FeatureRow> rows = load_features_csv(features);
  RuleBase rb = load_rulebase_csv(rulebase, cfg.inputs, cfg.output);
  InferenceEngine engine(std::move(rb), cfg.resolution);
  std::vector<LabelRow> labels = classify_all(cfg, engine, rows);

  OutputSet os(cfg.paths.output_dir);
  os.add("labels.csv", labels_to_csv(labels));
  os.commit();

  std::map<std::string, std::size_t> counts;
  for (const auto& s : engine.rulebase().output.subsets) counts[s.name] = 0;
  for (const auto& l : labels) counts[l.label]++;
  out << "windows: " << labels.size() << " engine: " << cfg.engine << "\n";
  for (const auto& s : engine.rulebase().output.subsets)
    out << s.name << ": " << counts[s.name] << "\n";
  return 0;
}

int run_cluster(const PipelineConfig& cfg, const CliOptions& o, std::ostream& out) {
  std::string features = pick_path(o.features, cfg.paths.features,
                                   cfg.paths.output_dir + "/features.csv", "features");
  std::vector<FeatureRow> rows = load_features_csv(features);
  if (rows.empty()) throw DataError("TooFewSamples", features + ": no feature rows");

  Eigen::MatrixXd X(rows.size(), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto vals = rows[i].features.to_array();
    for (int j = 0; j < 4; ++j) X(static_cast<Eigen::Index>(i), j) = vals[j];
  }

  OutputSet os(cfg.paths.output_dir);
  std::string metrics = "method,silhouette,calinski_harabasz,davies_bouldin\n";
  for (ClusterMethod method : cfg.clustering.methods) {
    ClusterResult res = fit_clusters(X, method, cfg.clustering.options);
    std::vector<int> ranks = style_ranks(res.model);
    std::vector<std::string> names = style_names(res.model.k);

    std::vector<std::string> header = feature_header();
    header.insert(header.end(), {"cluster", "label"});
    std::string text = csv_join(header) + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<std::string> fields = feature_row_fields(rows[i]);
      fields.push_back(std::to_string(res.assignments[i]));
      fields.push_back(names[ranks[res.assignments[i]]]);
      text += csv_join(fields) + "\n";
    }
    os.add(std::string("cluster_") + to_string(method) + "_assignments.csv", text);
    os.add(std::string("cluster_") + to_string(method) + "_model.json", model_to_json(res.model));

    Eigen::MatrixXd W = apply_standardization(X, res.model.transform);
    ValidationScores scores = internal_validation(W, res.assignments);
    metrics += csv_join({to_string(method), format_double(scores.silhouette),
                         format_double(scores.calinski_harabasz),
                         format_double(scores.davies_bouldin)}) +
               "\n";
    out << to_string(method) << ": silhouette " << format_double(scores.silhouette) << "\n";
  }
  os.add("cluster_metrics.csv", metrics);
  os.commit();
  return 0;
}

int run_report(const PipelineConfig& cfg, const CliOptions& o, std::ostream& out) {
  std::string labels = pick_path(o.labels, cfg.paths.labels,
                                 cfg.paths.output_dir + "/labels.csv", "labels");
  std::vector<LabelRow> rows = load_labels_csv(labels);
  std::vector<std::string> class_order;
  for (const auto& s : cfg.output.subsets) class_order.push_back(s.name);
  std::vector<ReportEntry> entries = build_report(rows, class_order);

  OutputSet os(cfg.paths.output_dir);
  os.add("report.csv", report_to_csv(entries));
  os.add("report.json", report_to_json(entries));
  os.commit();

  out << "report rows: " << entries.size() << "\n";
  return 0;
}

void print_error(std::ostream& err, const std::string& code, const std::string& kind,
                 const std::string& message) {
  ordered_json doc;
  doc["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  err << doc.dump() << "\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"interval type-2 fuzzy driving style analysis"};
  app.require_subcommand(1);
  CliOptions o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "pipeline configuration JSON")->required();
    sub->add_option("--output-dir", o.output_dir, "output directory override");
    sub->add_option("--seed", o.seed, "random seed override");
    sub->add_option("--filter", o.filter, "filter override: savgol, ekf or raw");
    sub->add_option("--unit-mode", o.unit_mode, "velocity unit override: kmh or ms");
    sub->add_option("--window-seconds", o.window_seconds, "window length override");
    sub->add_option("--resolution", o.resolution, "discretization override");
  };

  CLI::App* validate = app.add_subcommand("validate-config", "validate a configuration file");
  add_common(validate);
  CLI::App* build = app.add_subcommand("build-rulebase", "aggregate expert judgments into rules");
  add_common(build);
  build->add_option("--judgments", o.judgments, "judgment CSV path");
  CLI::App* extract = app.add_subcommand("extract", "filter trajectories and extract features");
  add_common(extract);
  extract->add_option("--trajectories", o.trajectories, "trajectory CSV path");
  CLI::App* classify = app.add_subcommand("classify", "label feature windows with the fuzzy system");
  add_common(classify);
  classify->add_option("--features", o.features, "feature CSV path");
  classify->add_option("--rulebase", o.rulebase, "rule base CSV path");
  classify->add_option("--engine", o.engine, "inference engine: t2 or t1");
  CLI::App* cluster = app.add_subcommand("cluster", "fit clustering baselines on features");
  add_common(cluster);
  cluster->add_option("--features", o.features, "feature CSV path");
  CLI::App* report = app.add_subcommand("report", "summarize labeled windows per class");
  add_common(report);
  report->add_option("--labels", o.labels, "label CSV path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dstyle");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    PipelineConfig cfg = load_config(o.config);
    apply_overrides(cfg, o);

    if (app.got_subcommand(validate)) return run_validate(cfg, out);
    if (app.got_subcommand(build)) return run_build_rulebase(cfg, o, out);
    if (app.got_subcommand(extract)) return run_extract(cfg, o, out);
    if (app.got_subcommand(classify)) return run_classify(cfg, o, out);
    if (app.got_subcommand(cluster)) return run_cluster(cfg, o, out);
    if (app.got_subcommand(report)) return run_report(cfg, o, out);
    print_error(err, "InvalidArguments", "config", "no subcommand given");
    return 2;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "InvalidArguments", "config", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(err, e.code(), to_string(e.kind()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    print_error(err, "Internal", "numeric", e.what());
    return 4;
  }
}

}  // namespace dstyle
