/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wbmpc/bench.hpp"
#include "wbmpc/collision_model.hpp"
#include "wbmpc/esdf.hpp"
#include "wbmpc/kinematics.hpp"
#include "wbmpc/plot.hpp"
#include "wbmpc/scenario.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string trace_out;
  std::string format = "text";
  bool json() const { return format == "json"; }
};

void emit(const Globals& g, const json& doc, const std::string& text) {
  if (g.json()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

int cmd_run(const Globals& g, const std::string& path, std::optional<double> duration) {
  const wbmpc::Scenario scenario = wbmpc::Scenario::load(path);
  std::unique_ptr<std::ofstream> file;
  wbmpc::RunOptions opt;
  opt.seed = g.seed;
  opt.duration = duration;
  if (!g.trace_out.empty()) {
    file = std::make_unique<std::ofstream>(g.trace_out);
    if (!*file) throw wbmpc::Error("cannot write '" + g.trace_out + "'");
    opt.trace_out = file.get();
  }
  const wbmpc::ScenarioResult r = wbmpc::run_scenario(scenario, opt);
  json doc = {{"scenario", scenario.name},
              {"iterations", r.trace.records.size()},
              {"aborted", r.trace.aborted},
              {"ee_error", r.ee_error},
              {"env_updates", r.env_updates}};
  if (!std::isnan(r.min_self_distance)) doc["min_self_distance"] = r.min_self_distance;
  if (!std::isnan(r.min_env_h)) doc["min_env_h"] = r.min_env_h;
  if (r.trace.aborted) doc["message"] = r.trace.message;
  char text[512];
  std::snprintf(text, sizeof text, "%s: %zu iterations, ee error %.4f m, min self d %.4f m, min env h %.4f m%s\n",
                scenario.name.c_str(), r.trace.records.size(), r.ee_error, r.min_self_distance, r.min_env_h,
                r.trace.aborted ? (" (aborted: " + r.trace.message + ")").c_str() : "");
  emit(g, doc, text);
  return r.trace.aborted ? 1 : 0;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_bench(const Globals& g, bool self, const std::string& list, int runs, int iterations,
              const std::string& scenario, const std::string& out) {
  wbmpc::BenchOptions opt;
  opt.strategies = split(list);
  opt.runs = runs;
  opt.iterations = iterations;
  opt.seed = g.seed;
  if (!scenario.empty()) opt.scenario = scenario;
  opt.progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
  const wbmpc::BenchReport report = self ? wbmpc::bench_self(opt) : wbmpc::bench_env(opt);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw wbmpc::Error("cannot write '" + out + "'");
    f << report.to_json().dump(2) << "\n";
  }
  std::string text;
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %8s %9s %9s %9s %8s %8s %8s %7s\n", "strategy", "samples", "mean ms",
                "median", "p95", "lq", "backward", "search", "ratio");
  text += line;
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof line, "%-26s %8zu %9.3f %9.3f %9.3f %8.3f %8.3f %8.3f %7.3f\n", e.label.c_str(),
                  e.samples, e.mean_ms, e.median_ms, e.p95_ms, e.phase_mean.lq_ms, e.phase_mean.backward_ms,
                  e.phase_mean.linesearch_ms, e.ratio);
    text += line;
  }
  emit(g, report.to_json(), text);
  return 0;
}

int cmd_esdf_build(const Globals& g, const std::string& scene_path, const std::string& out,
                   std::optional<double> resolution) {
  const wbmpc::Scene scene = wbmpc::Scene::load(scene_path);
  const wbmpc::OccupancyGrid occ = wbmpc::build_occupancy(scene, resolution.value_or(scene.resolution));
  const wbmpc::EsdfGrid esdf = wbmpc::compute_esdf(occ);
  wbmpc::export_grid(esdf, out);
  const auto& geo = esdf.geometry();
  json doc = {{"grid", out},
              {"dims", {geo.dims.x(), geo.dims.y(), geo.dims.z()}},
              {"resolution", geo.resolution},
              {"occupied", occ.count()}};
  char text[256];
  std::snprintf(text, sizeof text, "wrote %s (%d x %d x %d voxels, %zu occupied)\n", out.c_str(), geo.dims.x(),
                geo.dims.y(), geo.dims.z(), occ.count());
  emit(g, doc, text);
  return 0;
}

int cmd_spheres(const Globals& g, const std::string& model_path, const std::vector<double>& delta_max) {
  const wbmpc::RobotModel robot = wbmpc::RobotModel::load(model_path);
  const wbmpc::CollisionModelSpec spec = wbmpc::CollisionModelSpec::load(model_path, robot);
  const auto& sources = spec.sphere_sources();
  if (!delta_max.empty() && delta_max.size() != 1 && delta_max.size() != sources.size())
    throw wbmpc::ModelError("--delta-max takes one value or one per sphere source (" +
                            std::to_string(sources.size()) + ")");
  json list = json::array();
  std::string text;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& src = sources[i];
    const double dm = delta_max.empty() ? src.delta_max : delta_max[delta_max.size() == 1 ? 0 : i];
    const wbmpc::Decomposition d = wbmpc::decompose_primitive(src.shape, dm);
    json spheres = json::array();
    for (const auto& s : d.spheres) {
      const wbmpc::Vec3 c = src.local_pose * s.center;
      spheres.push_back({{"center", {c.x(), c.y(), c.z()}}, {"radius", s.radius}});
    }
    list.push_back({{"name", src.name},
                    {"link", robot.link(src.link).name},
                    {"shape", wbmpc::primitive_to_json(src.shape)},
                    {"delta_max", dm},
                    {"count", d.spheres.size()},
                    {"radius", d.spheres.front().radius},
                    {"protrusion", d.protrusion},
                    {"spheres", spheres}});
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-10s delta_max %.3f -> %2zu spheres, radius %.4f, protrusion %.4f\n",
                  src.name.c_str(), std::string(wbmpc::shape_name(src.shape)).c_str(), dm, d.spheres.size(),
                  d.spheres.front().radius, d.protrusion);
    text += line;
  }
  emit(g, {{"sources", list}}, text);
  return 0;
}

int cmd_plot(const Globals& g, const std::string& input, const std::string& out_dir) {
  const auto files = wbmpc::render_plots(input, out_dir);
  json doc = json::array();
  std::string text;
  for (const auto& f : files) {
    doc.push_back(f.string());
    text += "wrote " + f.string() + "\n";
  }
  emit(g, {{"files", doc}}, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-aware whole-body MPC: scenarios, benchmarks and tools"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized initial states")->capture_default_str();
  app.add_option("--trace-out", g.trace_out, "Write the line-delimited MPC trace here");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::function<int()> action;

  auto* run = app.add_subcommand("run", "Run a scenario in closed loop");
  std::string scenario_path;
  std::optional<double> duration;
  run->add_option("scenario", scenario_path, "Scenario document")->required();
  run->add_option("--duration", duration, "Override the scenario duration [s]");
  run->fallthrough();
  run->callback([&] { action = [&] { return cmd_run(g, scenario_path, duration); }; });

  auto* bench = app.add_subcommand("bench", "Computation benchmarks");
  bench->require_subcommand(1);
  int runs = 5, iterations = 1000;
  std::string list, bench_scenario, report_out;
  auto add_bench_opts = [&](CLI::App* sub, const char* list_name, const char* help) {
    sub->add_option(list_name, list, help);
    sub->add_option("--runs", runs, "Runs per strategy")->capture_default_str();
    sub->add_option("--iterations", iterations, "Measured MPC iterations per run")->capture_default_str();
    sub->add_option("--scenario", bench_scenario, "Scenario to benchmark instead of the shipped one");
    sub->add_option("-o,--output", report_out, "Write the JSON report here");
    sub->fallthrough();
  };
  auto* bself = bench->add_subcommand("self", "Self-collision strategies a-d against blind");
  add_bench_opts(bself, "--strategies", "Comma-separated subset of a,b,c,d");
  bself->callback([&] { action = [&] { return cmd_bench(g, true, list, runs, iterations, bench_scenario, report_out); }; });
  auto* benv = bench->add_subcommand("env", "Environment-collision methods against blind");
  add_bench_opts(benv, "--methods", "Comma-separated subset of esdf_spheres,primitives_vs_occupancy,blind");
  benv->callback([&] { action = [&] { return cmd_bench(g, false, list, runs, iterations, bench_scenario, report_out); }; });
  bench->fallthrough();

  auto* esdf = app.add_subcommand("esdf", "Signed distance field tools");
  esdf->require_subcommand(1);
  auto* build = esdf->add_subcommand("build", "Build and export the field of a scene");
  std::string scene_path, grid_out;
  std::optional<double> resolution;
  build->add_option("scene", scene_path, "Scene document")->required();
  build->add_option("-o,--output", grid_out, "Grid file (a .json header is written next to it)")->required();
  build->add_option("--resolution", resolution, "Override the scene resolution [m]");
  build->fallthrough();
  esdf->fallthrough();
  build->callback([&] { action = [&] { return cmd_esdf_build(g, scene_path, grid_out, resolution); }; });

  auto* spheres = app.add_subcommand("spheres", "Decompose collision bodies into spheres");
  std::string model_path;
  std::vector<double> delta_max;
  spheres->add_option("collision-model", model_path, "Robot document with a collision section")->required();
  spheres->add_option("--delta-max", delta_max, "One value, or one per sphere source [m]")->delimiter(',');
  spheres->fallthrough();
  spheres->callback([&] { action = [&] { return cmd_spheres(g, model_path, delta_max); }; });

  auto* plot = app.add_subcommand("plot", "Render a trace or a benchmark report as SVG");
  std::string plot_in, plot_dir;
  plot->add_option("input", plot_in, "Trace (.jsonl) or report (.json)")->required();
  plot->add_option("-o,--output", plot_dir, "Output directory")->required();
  plot->fallthrough();
  plot->callback([&] { action = [&] { return cmd_plot(g, plot_in, plot_dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action ? action() : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
