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
#include "wbmpc/bench.hpp"

#include <algorithm>
#include <cmath>

#include "wbmpc/scenario.hpp"

namespace wbmpc {

using nlohmann::json;

const StrategyStats& BenchReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw Error("benchmark report has no entry '" + name + "'");
}

json BenchReport::to_json() const {
  json j = {{"kind", kind}, {"runs", runs}, {"iterations", iterations}, {"warmup", warmup}};
  json list = json::array();
  for (const auto& e : entries) {
    list.push_back({{"name", e.name},
                    {"label", e.label},
                    {"samples", e.samples},
                    {"mean_ms", e.mean_ms},
                    {"median_ms", e.median_ms},
                    {"p95_ms", e.p95_ms},
                    {"phases_ms", {{"lq", e.phase_mean.lq_ms}, {"backward", e.phase_mean.backward_ms}, {"linesearch", e.phase_mean.linesearch_ms}}},
                    {"ratio", e.ratio},
                    {"aborted", e.aborted}});
  }
  j["strategies"] = list;
  return j;
}

BenchReport BenchReport::from_json(const json& doc) {
  BenchReport r;
  try {
    r.kind = doc.at("kind").get<std::string>();
    r.runs = doc.value("runs", 0);
    r.iterations = doc.value("iterations", 0);
    r.warmup = doc.value("warmup", 0);
    for (const auto& e : doc.at("strategies")) {
      StrategyStats s;
      s.name = e.at("name").get<std::string>();
      s.label = e.value("label", s.name);
      s.samples = e.value("samples", std::size_t{0});
      s.mean_ms = e.at("mean_ms").get<double>();
      s.median_ms = e.value("median_ms", s.mean_ms);
      s.p95_ms = e.value("p95_ms", s.mean_ms);
      const json& p = e.at("phases_ms");
      s.phase_mean = {p.at("lq").get<double>(), p.at("backward").get<double>(), p.at("linesearch").get<double>()};
      s.ratio = e.at("ratio").get<double>();
      s.aborted = e.value("aborted", false);
      r.entries.push_back(s);
    }
  } catch (const json::exception& ex) {
    throw ModelError(std::string("benchmark report: ") + ex.what());
  }
  return r;
}

StrategyStats summarize(const std::string& name, const std::string& label,
                        const std::vector<PhaseTimes>& samples) {
  StrategyStats s;
  s.name = name;
  s.label = label;
  s.samples = samples.size();
  if (samples.empty()) return s;
  std::vector<double> totals;
  totals.reserve(samples.size());
  for (const auto& t : samples) {
    totals.push_back(t.total());
    s.phase_mean.lq_ms += t.lq_ms;
    s.phase_mean.backward_ms += t.backward_ms;
    s.phase_mean.linesearch_ms += t.linesearch_ms;
  }
  const double n = static_cast<double>(samples.size());
  s.phase_mean.lq_ms /= n;
  s.phase_mean.backward_ms /= n;
  s.phase_mean.linesearch_ms /= n;
  s.mean_ms = s.phase_mean.total();
  std::sort(totals.begin(), totals.end());
  const std::size_t m = totals.size();
  s.median_ms = m % 2 ? totals[m / 2] : 0.5 * (totals[m / 2 - 1] + totals[m / 2]);
  s.p95_ms = totals[std::min(m - 1, static_cast<std::size_t>(std::ceil(0.95 * m)) - 1)];
  return s;
}

namespace {

struct Variant {
  std::string name;
  std::string label;
  std::string self;
  std::string model;
  std::string env;
};

StrategyStats measure(const Scenario& base, const Variant& v, const BenchOptions& opt) {
  Scenario sc = base;
  sc.self_strategy = v.self;
  sc.env = v.env;
  sc.set_model(v.model);
  std::vector<PhaseTimes> samples;
  bool aborted = false;
  for (int run = 0; run < opt.runs; ++run) {
    if (opt.progress) opt.progress(v.name + " run " + std::to_string(run + 1) + "/" + std::to_string(opt.runs));
    ScenarioInstance inst(sc);
    MpcOptions mpc;
    mpc.before_step = [&](double t) { inst.advance_environment(t); };
    int index = 0;
    mpc.on_record = [&](const MpcRecord& r) {
      if (index++ >= opt.warmup) samples.push_back(r.times);
    };
    const int steps = opt.warmup + opt.iterations;
    const MpcTrace trace = mpc_run(inst.problem(), inst.initial_state(opt.seed + run), steps / sc.rate, sc.rate, mpc);
    aborted = aborted || trace.aborted;
  }
  StrategyStats s = summarize(v.name, v.label, samples);
  s.aborted = aborted;
  return s;
}

BenchReport run_variants(const std::string& kind, const std::vector<Variant>& all,
                         const BenchOptions& opt, const std::filesystem::path& fallback) {
  const Scenario base = Scenario::load(opt.scenario.empty() ? fallback : opt.scenario);
  std::vector<Variant> chosen;
  for (const auto& v : all) {
    const bool wanted = v.name == "blind" || opt.strategies.empty() ||
                        std::find(opt.strategies.begin(), opt.strategies.end(), v.name) != opt.strategies.end();
    if (wanted) chosen.push_back(v);
  }
  for (const auto& s : opt.strategies) {
    if (std::none_of(all.begin(), all.end(), [&](const Variant& v) { return v.name == s; }))
      throw ModelError("unknown " + kind + " benchmark strategy '" + s + "'");
  }
  BenchReport report;
  report.kind = kind;
  report.runs = opt.runs;
  report.iterations = opt.iterations;
  report.warmup = opt.warmup;
  for (const auto& v : chosen) report.entries.push_back(measure(base, v, opt));
  const double blind = report.at("blind").mean_ms;
  for (auto& e : report.entries) e.ratio = e.name == "blind" ? 1.0 : e.mean_ms / blind;
  return report;
}

}  // namespace

BenchReport bench_self(const BenchOptions& options) {
  const std::vector<Variant> variants = {
      {"blind", "blind", "off", "simplified", "off"},
      {"a", "detailed naive", "naive", "detailed", "off"},
      {"b", "detailed broad-phase", "broadphase", "detailed", "off"},
      {"c", "simplified naive", "naive", "simplified", "off"},
      {"d", "simplified broad-phase", "broadphase", "simplified", "off"},
  };
  return run_variants("self", variants, options,
                      std::filesystem::path(WBMPC_DATA_DIR) / "scenarios" / "bench_self.json");
}

BenchReport bench_env(const BenchOptions& options) {
  const std::vector<Variant> variants = {
      {"blind", "blind", "off", "simplified", "off"},
      {"esdf_spheres", "ESDF spheres", "off", "simplified", "esdf"},
      {"primitives_vs_occupancy", "primitives vs occupancy", "off", "simplified", "primitives"},
  };
  return run_variants("env", variants, options,
                      std::filesystem::path(WBMPC_DATA_DIR) / "scenarios" / "bench_env.json");
}

}  // namespace wbmpc
