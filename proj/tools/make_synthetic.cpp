// Deterministic generator for the bundled fixtures: a default configuration,
// an eight-expert judgment table, a small analytic trajectory file and a
// 300-agent synthetic corpus with three distinct driving styles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "dstyle/csv.hpp"
#include "dstyle/mamdani.hpp"
#include "dstyle/pipeline.hpp"

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

// Box-Muller, written out so the fixture bytes do not depend on a library's
// unspecified normal_distribution algorithm.
double gaussian(std::uint64_t& state) {
  double u1 = std::max(uniform01(state), 1e-300);
  double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Expert opinions follow a severity score that rises with every antecedent.
// Opinions sit near 1 + 8 * severity on the 1..9 scale with a small
// expert-specific jitter; the all-lowest combination is pinned to 1..2 so a
// clearly gentle window maps to the first style.
std::string make_judgments(const dstyle::PipelineConfig& cfg) {
  const auto& inputs = cfg.inputs;
  const std::size_t combos = dstyle::combination_count(inputs);
  const int experts = 8;

  std::vector<std::string> header;
  for (const auto& v : inputs) header.push_back(v.name);
  for (int e = 1; e <= experts; ++e) header.push_back("expert" + std::to_string(e));
  std::string text = dstyle::csv_join(header) + "\n";

  const std::array<int, 4> jitter{-1, 0, 0, 1};
  for (std::size_t r = 0; r < combos; ++r) {
    std::vector<int> idx = dstyle::decode_combination(r, inputs);
    double severity = 0.4 * idx[0] / 4.0 + 0.25 * idx[1] / 2.0 + 0.15 * idx[2] / 2.0 +
                      0.2 * idx[3] / 2.0;
    double base = 1.0 + 8.0 * severity;
    std::vector<std::string> row;
    for (std::size_t v = 0; v < inputs.size(); ++v)
      row.push_back(inputs[v].subsets[static_cast<std::size_t>(idx[v])].name);
    for (int e = 0; e < experts; ++e) {
      std::uint64_t st = 0xd1f7a9c3ULL + 131ULL * r + 7919ULL * static_cast<std::uint64_t>(e);
      int term = static_cast<int>(std::lround(base)) + jitter[splitmix(st) % 4];
      term = std::clamp(term, 1, 9);
      if (r == 0) term = std::min(term, 2);
      row.push_back(std::to_string(term));
    }
    text += dstyle::csv_join(row) + "\n";
  }
  return text;
}

struct AgentProfile {
  double v0 = 10.0;       // mean speed, m/s
  double amp = 0.0;       // speed triangle amplitude, m/s
  double period = 2.5;    // speed triangle period, s
  double yaw_amp = 0.0;   // yaw rate amplitude, rad/s
  double yaw_freq = 0.5;  // yaw rate frequency, Hz
  double phase = 0.0;     // yaw phase, rad
  double noise = 0.0;     // position noise stddev, m
};

double speed_at(const AgentProfile& p, double t) {
  if (p.amp == 0.0) return p.v0;
  double ph = std::fmod(t, p.period) / p.period;
  double tri = ph < 0.5 ? 4.0 * ph - 1.0 : 3.0 - 4.0 * ph;
  return p.v0 + p.amp * tri;
}

dstyle::Trajectory simulate(const std::string& id, const AgentProfile& p, std::uint64_t seed) {
  const double dt_fine = 0.01;
  const int per_sample = 10;  // 0.1 s between stored samples
  const int samples = 51;     // 5.0 s of data, one full feature window

  std::uint64_t st = seed;
  dstyle::Trajectory traj{id, {}};
  double x = 0.0, y = 0.0, t = 0.0;
  double heading = 2.0 * std::numbers::pi * uniform01(st);
  for (int i = 0; i < samples; ++i) {
    double nx = p.noise > 0.0 ? p.noise * gaussian(st) : 0.0;
    double ny = p.noise > 0.0 ? p.noise * gaussian(st) : 0.0;
    traj.samples.push_back({0.1 * i, x + nx, y + ny});
    if (i + 1 == samples) break;
    for (int k = 0; k < per_sample; ++k) {
      double v = speed_at(p, t);
      double w = p.yaw_amp * std::sin(2.0 * std::numbers::pi * p.yaw_freq * t + p.phase);
      heading += w * dt_fine;
      x += v * std::cos(heading) * dt_fine;
      y += v * std::sin(heading) * dt_fine;
      t += dt_fine;
    }
  }
  return traj;
}

std::vector<dstyle::Trajectory> make_corpus() {
  struct StyleSpec {
    const char* name;
    AgentProfile base;
  };
  // Target features per style (after km/h conversion):
  //   calm       ~11 km/h, +-0.4 m/s^2, jerk std ~1 m/s^3
  //   moderate   ~45 km/h, +-4.5 m/s^2, jerk std ~7 m/s^3
  //   aggressive ~86 km/h, +-8.0 m/s^2, jerk std ~13 m/s^3
  const std::vector<StyleSpec> styles{
      {"calm", {3.0, 0.28, 2.5, 0.15, 0.5, 0.0, 0.005}},
      {"moderate", {12.5, 3.1875, 2.5, 0.252, 0.5, 0.0, 0.01}},
      {"aggressive", {24.0, 5.625, 2.5, 0.203, 0.6, 0.0, 0.02}},
  };

  std::vector<dstyle::Trajectory> corpus;
  for (std::size_t s = 0; s < styles.size(); ++s) {
    for (int a = 0; a < 100; ++a) {
      std::uint64_t st = 0xabcdef12ULL + 1000003ULL * s + 17ULL * static_cast<std::uint64_t>(a);
      AgentProfile p = styles[s].base;
      p.v0 *= 1.0 + 0.04 * (uniform01(st) - 0.5);
      p.amp *= 1.0 + 0.08 * (uniform01(st) - 0.5);
      p.yaw_amp *= 1.0 + 0.10 * (uniform01(st) - 0.5);
      p.yaw_freq *= 1.0 + 0.05 * (uniform01(st) - 0.5);
      p.phase = 2.0 * std::numbers::pi * uniform01(st);
      char idbuf[32];
      std::snprintf(idbuf, sizeof idbuf, "%s_%03d", styles[s].name, a);
      corpus.push_back(simulate(idbuf, p, splitmix(st)));
    }
  }
  return corpus;
}

// Three agents with closed-form motion for pipeline sanity tests: constant
// speed straight line, constant acceleration straight line, constant speed
// circle (radius 50 m, so lateral acceleration is exactly 2 m/s^2).
std::vector<dstyle::Trajectory> make_analytic() {
  std::vector<dstyle::Trajectory> out;
  const int samples = 51;

  dstyle::Trajectory straight{"straight", {}};
  dstyle::Trajectory ramp{"ramp", {}};
  dstyle::Trajectory circle{"circle", {}};
  const double radius = 50.0, v = 10.0;
  for (int i = 0; i < samples; ++i) {
    double t = 0.1 * i;
    straight.samples.push_back({t, 10.0 * t, 0.0});
    ramp.samples.push_back({t, 5.0 * t + 0.5 * t * t, 0.0});
    circle.samples.push_back(
        {t, radius * std::sin(v * t / radius), radius * (1.0 - std::cos(v * t / radius))});
  }
  out.push_back(std::move(straight));
  out.push_back(std::move(ramp));
  out.push_back(std::move(circle));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string root = argc > 1 ? argv[1] : "data";
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(root) / "trajectories");
  fs::create_directories(fs::path(root) / "judgments");

  dstyle::PipelineConfig cfg = dstyle::default_config();
  cfg.paths.trajectories = root + "/trajectories/corpus300.csv";
  cfg.paths.judgments = root + "/judgments/experts8.csv";
  cfg.paths.output_dir = "out";

  dstyle::write_text_file(root + "/default_config.json", dstyle::config_to_json(cfg));
  dstyle::write_text_file(root + "/judgments/experts8.csv", make_judgments(cfg));

  std::vector<dstyle::Trajectory> corpus = make_corpus();
  dstyle::save_trajectories_csv(corpus, root + "/trajectories/corpus300.csv");
  std::vector<dstyle::Trajectory> analytic = make_analytic();
  dstyle::save_trajectories_csv(analytic, root + "/trajectories/agents3.csv");

  std::cout << "wrote fixtures under " << root << "\n";
  return 0;
}
