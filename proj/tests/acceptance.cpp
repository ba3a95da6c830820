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
// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "oracles.hpp"
#include "wbmpc/bench.hpp"
#include "wbmpc/collision_model.hpp"
#include "wbmpc/esdf.hpp"
#include "wbmpc/ocp.hpp"
#include "wbmpc/penalty.hpp"
#include "wbmpc/scenario.hpp"
#include "wbmpc/self_collision.hpp"

using namespace wbmpc;

namespace {

const std::string kData = WBMPC_DATA_DIR;

// Tolerances.
constexpr double kGradientRelTol = 1e-4;
constexpr double kGradientSeconds = 10.0;
constexpr double kBroadphaseTol = 1e-9;
constexpr double kEsdfTol = 1e-9;
constexpr double kAffineTol = 1e-9;
constexpr double kQueryGradTol = 1e-6;
constexpr double kRbfTol = 1e-9;
constexpr double kRiccatiGap = 1e-8;
constexpr double kEnvClearance = -0.02;
constexpr double kSelfDistance = 0.0;
constexpr double kEeTolerance = 0.05;
constexpr double kEsdfOverhead = 0.30;
constexpr double kPrimitivesFactor = 5.0;
constexpr int kBenchRuns = 5;
constexpr int kBenchIterations = 1000;
constexpr int kBenchWarmup = 50;
constexpr double kBenchMinutes = 10.0;
constexpr int kDecompositionSamples = 10000;
constexpr double kThroughputMs = 50.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fixture {
  RobotModel robot;
  CollisionModelSpec spec;
  explicit Fixture(const std::string& name)
      : robot(RobotModel::load(kData + "/robots/" + name + ".json")),
        spec(CollisionModelSpec::load(kData + "/robots/" + name + ".json", robot)) {}
};

// Relative error of an analytic gradient against central differences, or a
// negative value when the two FD step sizes disagree (witness or cell switch).
double gradient_error(const std::function<double(const Configuration&)>& h, const Configuration& q,
                      const VectorXd& analytic) {
  const VectorXd fd = oracle::fd_tangent_gradient(h, q, 1e-6);
  const VectorXd coarse = oracle::fd_tangent_gradient(h, q, 1e-5);
  const double scale = std::max(1.0, fd.norm());
  if ((fd - coarse).norm() > 1e-4 * scale) return -1.0;
  return (analytic - fd).norm() / scale;
}

Outcome gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int configurations = 0;
  oracle::Rng rng(1001);
  for (const char* name : {"robot_simplified", "robot_detailed"}) {
    const Fixture f(name);
    int done = 0;
    for (int attempt = 0; done < 50 && attempt < 5000; ++attempt) {
      const Configuration q = oracle::random_configuration(f.robot, rng, 2.5);
      const auto evals = evaluate_naive(f.robot, f.spec, q, 0.1);
      double local = 0.0;
      int checked = 0;
      for (std::size_t i = 0; i < evals.size(); ++i) {
        if (evals[i].approximate || evals[i].h < -0.09) continue;
        const double e = gradient_error(
            [&](const Configuration& x) { return evaluate_naive(f.robot, f.spec, x, 0.1)[i].h; }, q, evals[i].grad);
        if (e < 0.0) continue;
        local = std::max(local, e);
        ++checked;
      }
      if (checked == 0) continue;
      worst = std::max(worst, local);
      ++done;
    }
    configurations += done;
  }

  // Sphere constraints against the static-obstacle field.
  ScenarioInstance inst(Scenario::load(kData + "/scenarios/static_reach.json"));
  const WholeBodyCost& cost = inst.cost();
  int env_done = 0;
  for (int attempt = 0; env_done < 100 && attempt < 5000; ++attempt) {
    Configuration q = oracle::random_configuration(inst.robot(), rng, 2.0, 0.6);
    q.base.translation.z() = 0.5;
    int outside = 0;
    const auto evals = cost.env_constraints(forward_kinematics(inst.robot(), q), true, &outside);
    if (outside > 0) continue;
    double local = 0.0;
    int checked = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      const double e = gradient_error(
          [&](const Configuration& x) { return cost.env_constraints(forward_kinematics(inst.robot(), x), false)[i].h; },
          q, evals[i].grad);
      if (e < 0.0) continue;
      local = std::max(local, e);
      ++checked;
    }
    if (checked == 0) continue;
    worst = std::max(worst, local);
    ++env_done;
  }
  const double secs = seconds_since(t0);
  return {configurations == 100 && env_done == 100 && worst <= kGradientRelTol && secs < kGradientSeconds,
          fmt("max rel err %.2e over %d self + %d sphere configurations, %.1f s", worst, configurations, env_done,
              secs)};
}

Outcome broadphase_correctness() {
  double worst = 0.0;
  int total = 0;
  for (const char* name : {"robot_simplified", "robot_detailed"}) {
    const Fixture f(name);
    oracle::Rng rng(1002);
    for (int trial = 0; trial < 1000; ++trial) {
      const Configuration q = oracle::random_configuration(f.robot, rng, 2.5);
      const auto frames = forward_kinematics(f.robot, q);
      const auto poses = body_poses(f.spec, frames);
      const auto broad = evaluate_broadphase(f.robot, f.spec, frames, 0.0, false);
      const auto& arm = f.spec.arm_bodies();
      if (broad.size() != arm.size()) return {false, fmt("%s: %zu constraints for %zu arm bodies", name, broad.size(), arm.size())};
      for (std::size_t i = 0; i < arm.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int b : f.spec.base_bodies())
          best = std::min(best, pair_distance(f.spec.bodies()[arm[i]].shape, poses[arm[i]], f.spec.bodies()[b].shape,
                                              poses[b])
                                    .signed_distance);
        worst = std::max(worst, std::abs(broad[i].h - best));
      }
      ++total;
    }
  }
  return {worst <= kBroadphaseTol, fmt("max |broad - naive| %.2e over %d configurations", worst, total)};
}

OccupancyGrid random_grid(oracle::Rng& rng, int n, double fill) {
  OccupancyGrid occ;
  occ.geometry.origin = Vec3(-0.4, 0.7, -0.1);
  occ.geometry.resolution = 0.05;
  occ.geometry.dims = Eigen::Vector3i(n, n, n);
  std::bernoulli_distribution b(fill);
  occ.occupied.resize(occ.geometry.size());
  for (auto& v : occ.occupied) v = b(rng);
  return occ;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Outcome esdf_exactness() {
  oracle::Rng rng(1003);
  double full = 0.0;
  std::uniform_real_distribution<double> fill(0.005, 0.2);
  for (int g = 0; g < 20; ++g) {
    const OccupancyGrid occ = random_grid(rng, 32, fill(rng));
    full = std::max(full, max_diff(compute_esdf(occ).distances(), oracle::brute_force_esdf(occ)));
  }
  double incremental = 0.0;
  for (int stream = 0; stream < 5; ++stream) {
    OccupancyGrid occ = random_grid(rng, 32, fill(rng));
    EsdfGrid e = compute_esdf(occ);
    std::uniform_int_distribution<std::size_t> pick(0, occ.geometry.size() - 1);
    for (int step = 0; step < 20; ++step) {
      OccupancyChange ch;
      std::set<std::size_t> touched;
      const int count = 1 + static_cast<int>(rng() % 40);
      for (int i = 0; i < count; ++i) {
        const std::size_t v = pick(rng);
        if (!touched.insert(v).second) continue;
        (occ.occupied[v] ? ch.freed : ch.occupied).push_back(v);
        occ.occupied[v] ^= 1;
      }
      e = update_esdf(e, ch);
      incremental = std::max(incremental, max_diff(e.distances(), compute_esdf(occ).distances()));
    }
  }
  return {full <= kEsdfTol && incremental <= kEsdfTol,
          fmt("full vs brute force %.2e on 20 grids; incremental vs full %.2e over 5 x 20 steps", full, incremental)};
}

Outcome trilinear_queries() {
  oracle::Rng rng(1004);
  const OccupancyGrid occ = random_grid(rng, 20, 0.05);
  const EsdfGrid e = compute_esdf(occ);
  const GridGeometry& g = e.geometry();
  double centers = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) centers = std::max(centers, std::abs(e.query(g.center(v)).distance - e.distance(v)));

  const Vec3 abc(0.4, -0.9, 0.25);
  std::vector<double> lattice(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) lattice[v] = abc.dot(g.center(v)) - 0.3;
  const EsdfGrid affine = EsdfGrid::from_distances(g, lattice);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double affine_err = 0.0;
  const Vec3 span = (g.dims - Eigen::Vector3i::Ones()).cast<double>() * g.resolution;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p = g.center(0, 0, 0) + span.cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    const EsdfSample s = affine.query(p);
    affine_err = std::max({affine_err, std::abs(s.distance - (abc.dot(p) - 0.3)), (s.gradient - abc).norm()});
  }

  double grad_err = 0.0;
  const double h = g.resolution / 100.0;
  std::uniform_int_distribution<int> cell(0, g.dims.x() - 2);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p = g.center(cell(rng), cell(rng), cell(rng)) +
                   g.resolution * Vec3(0.05 + 0.9 * u(rng), 0.05 + 0.9 * u(rng), 0.05 + 0.9 * u(rng));
    const Vec3 grad = e.query(p).gradient;
    for (int a = 0; a < 3; ++a) {
      const Vec3 d = Vec3::Unit(a) * h;
      grad_err = std::max(grad_err, std::abs((e.query(p + d).distance - e.query(p - d).distance) / (2 * h) - grad[a]));
    }
  }
  return {centers == 0.0 && affine_err <= kAffineTol && grad_err <= kQueryGradTol,
          fmt("voxel centers %.1e, affine %.2e, gradient vs FD %.2e", centers, affine_err, grad_err)};
}

Outcome rbf_continuity() {
  double worst = 0.0;
  for (const RbfParams p : {RbfParams{1e-2, 1e-3}, RbfParams{0.5, 0.02}}) {
    // Adjacent doubles on either side of the switch select different branches.
    const RbfValue lo = rbf_eval(std::nextafter(p.delta, 0.0), p);
    const RbfValue hi = rbf_eval(std::nextafter(p.delta, 1.0), p);
    const auto rel = [](double x, double y) { return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}); };
    const double mismatch = std::max({rel(lo.value, hi.value), rel(lo.d1, hi.d1), rel(lo.d2, hi.d2)});
    worst = std::max(worst, mismatch);
  }
  return {worst <= kRbfTol, fmt("max one-sided mismatch %.2e at h = delta for both parameter sets", worst)};
}

Outcome slq_optimality() {
  oracle::Rng rng(1006);
  double gap = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::LqInstance p;
    p.A = MatrixXd::NullaryExpr(6, 6, [&] { return u(rng); });
    p.B = MatrixXd::NullaryExpr(6, 3, [&] { return u(rng); });
    const MatrixXd M = MatrixXd::NullaryExpr(6, 6, [&] { return u(rng); });
    p.Q = M * M.transpose() + 0.1 * MatrixXd::Identity(6, 6);
    p.R = MatrixXd::Identity(3, 3) * (0.2 + std::abs(u(rng)));
    p.Qf = 2.0 * p.Q;
    p.x_ref = VectorXd::NullaryExpr(6, [&] { return u(rng); });
    p.u_ref = VectorXd::NullaryExpr(3, [&] { return 0.3 * u(rng); });
    p.x0 = VectorXd::NullaryExpr(6, [&] { return 2.0 * u(rng); });
    const LinearDynamics dyn(p.A, p.B);
    const QuadraticCost cost(p.Q, p.R, p.Qf, p.x_ref, p.u_ref);
    OcpProblem problem{&dyn, &cost, 1.0, 20};
    const Trajectory start = rollout(problem, p.x0, std::vector<VectorXd>(20, VectorXd::Zero(3)), 0.0);
    gap = std::max(gap, std::abs(slq_iterate(problem, start).trajectory.cost - oracle::solve_batch_lq(p).cost));
  }
  return {gap <= kRiccatiGap, fmt("max cost gap %.2e over 20 LQ instances (N = 20, T = 1 s)", gap)};
}

Outcome collision_free_planning() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"static_reach", "moving_obstacle", "door_frame"}) {
    const ScenarioResult r = run_scenario(Scenario::load(kData + "/scenarios/" + name + ".json"));
    const bool ok = !r.trace.aborted && r.min_env_h > kEnvClearance && r.min_self_distance > kSelfDistance &&
                    r.ee_error <= kEeTolerance;
    pass = pass && ok;
    detail += fmt("%s%s: env %.3f, self d %.3f, ee %.4f", detail.empty() ? "" : "; ", name, r.min_env_h,
                  r.min_self_distance, r.ee_error);
  }
  return {pass, detail};
}

Outcome benchmark_orderings() {
  const auto t0 = std::chrono::steady_clock::now();
  BenchOptions opt;
  opt.runs = kBenchRuns;
  opt.iterations = kBenchIterations;
  opt.warmup = kBenchWarmup;
  const BenchReport self = bench_self(opt);
  const BenchReport env = bench_env(opt);
  const double minutes = seconds_since(t0) / 60.0;
  const auto& blind = self.at("blind");
  const auto &a = self.at("a"), &b = self.at("b"), &c = self.at("c"), &d = self.at("d");
  const auto &eb = env.at("blind"), &es = env.at("esdf_spheres"), &ep = env.at("primitives_vs_occupancy");
  const bool order = blind.mean_ms <= c.mean_ms && c.mean_ms <= a.mean_ms;
  const bool lq = b.phase_mean.lq_ms <= a.phase_mean.lq_ms && d.phase_mean.lq_ms <= c.phase_mean.lq_ms;
  const double overhead = es.mean_ms / eb.mean_ms - 1.0;
  const double factor = ep.mean_ms / es.mean_ms;
  bool aborted = false;
  for (const auto* r : {&self, &env})
    for (const auto& e : r->entries) aborted = aborted || e.aborted;
  return {order && lq && overhead <= kEsdfOverhead && factor >= kPrimitivesFactor && minutes < kBenchMinutes && !aborted,
          fmt("mean ms blind %.3f, c %.3f, a %.3f; LQ ms a %.3f / b %.3f, c %.3f / d %.3f; esdf overhead %.1f%%; "
              "primitives / esdf %.1fx; %.1f min",
              blind.mean_ms, c.mean_ms, a.mean_ms, a.phase_mean.lq_ms, b.phase_mean.lq_ms, c.phase_mean.lq_ms,
              d.phase_mean.lq_ms, 100.0 * overhead, factor, minutes)};
}

Outcome sphere_decomposition() {
  const Fixture f("robot_simplified");
  const std::vector<double> deltas = {0.40, 0.10, 0.05, 0.05, 0.10};
  const auto& sources = f.spec.sphere_sources();
  if (sources.size() != deltas.size()) return {false, fmt("%zu sphere sources, expected 5", sources.size())};
  oracle::Rng rng(1009);
  double gap = 0.0, excess = -1.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Decomposition d = decompose_primitive(sources[i].shape, deltas[i]);
    gap = std::max(gap, oracle::coverage_gap(sources[i].shape, d, kDecompositionSamples, rng));
    excess = std::max(excess, oracle::sampled_protrusion(sources[i].shape, d, kDecompositionSamples, rng) - deltas[i]);
  }
  return {gap <= 1e-6 && excess <= 1e-6,
          fmt("max uncovered depth %.2e, max protrusion minus bound %.3f m", gap, excess)};
}

Outcome mpc_throughput() {
  Scenario s = Scenario::load(kData + "/scenarios/static_reach.json");
  s.self_strategy = "naive";
  s.env = "esdf";
  s.set_model("simplified");
  const ScenarioResult r = run_scenario(s);
  std::vector<PhaseTimes> times;
  for (const auto& rec : r.trace.records) times.push_back(rec.times);
  const StrategyStats st = summarize("desk", "desk", times);
  return {st.samples > 0 && st.mean_ms < kThroughputMs,
          fmt("mean %.3f ms, p95 %.3f ms over %zu iterations", st.mean_ms, st.p95_ms, st.samples)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"gradient fidelity", gradient_fidelity},
      {"broad-phase correctness", broadphase_correctness},
      {"ESDF exactness", esdf_exactness},
      {"trilinear queries", trilinear_queries},
      {"barrier C2 continuity", rbf_continuity},
      {"SLQ optimality", slq_optimality},
      {"collision-free planning", collision_free_planning},
      {"benchmark orderings", benchmark_orderings},
      {"sphere decomposition", sphere_decomposition},
      {"MPC throughput", mpc_throughput},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%-4s criterion %2d  %-24s %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
