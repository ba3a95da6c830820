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
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "convex.hpp"

namespace wbmpc::detail {

namespace {

constexpr double kTouchDistance = 1e-12;

SupportVertex support_vertex(const ConvexCore& a, const ConvexCore& b, const Vec3& direction) {
  SupportVertex s;
  s.a = a.support(direction);
  s.b = b.support(-direction);
  s.w = s.a - s.b;
  return s;
}

// Closest point of a sub-simplex (given by indices) to the origin, restricted
// to its affine hull. Returns false for degenerate or non-convex solutions.
bool affine_closest(const std::array<SupportVertex, 4>& s, const int* idx, int m,
                    std::array<double, 4>& lambda, Vec3& v) {
  const Vec3& w0 = s[idx[0]].w;
  if (m == 1) {
    lambda[0] = 1.0;
    v = w0;
    return true;
  }
  if (m == 2) {
    const Vec3 e = s[idx[1]].w - w0;
    const double ee = e.squaredNorm();
    if (ee < 1e-30) return false;
    const double mu = -w0.dot(e) / ee;
    if (mu <= 0.0 || mu >= 1.0) return false;
    lambda[0] = 1.0 - mu;
    lambda[1] = mu;
    v = w0 + mu * e;
    return true;
  }
  if (m == 3) {
    const Vec3 e1 = s[idx[1]].w - w0, e2 = s[idx[2]].w - w0;
    const double g11 = e1.squaredNorm(), g22 = e2.squaredNorm(), g12 = e1.dot(e2);
    const double det = g11 * g22 - g12 * g12;
    if (!(g11 * g22 > 0.0) || det <= 1e-12 * g11 * g22) return false;
    const double r1 = -w0.dot(e1), r2 = -w0.dot(e2);
    const double mu1 = (g22 * r1 - g12 * r2) / det, mu2 = (g11 * r2 - g12 * r1) / det;
    if (mu1 <= 0.0 || mu2 <= 0.0 || mu1 + mu2 >= 1.0) return false;
    lambda[0] = 1.0 - mu1 - mu2;
    lambda[1] = mu1;
    lambda[2] = mu2;
    v = w0 + mu1 * e1 + mu2 * e2;
    return true;
  }
  Mat3 edges;
  for (int j = 1; j < 4; ++j) edges.col(j - 1) = s[idx[j]].w - w0;
  const Mat3 gram = edges.transpose() * edges;
  const double diag = gram(0, 0) * gram(1, 1) * gram(2, 2);
  const double det = gram.determinant();
  if (!(diag > 0.0) || det <= 1e-12 * diag) return false;
  const Vec3 mu = gram.inverse() * (-(edges.transpose() * w0));
  if ((mu.array() <= 0.0).any() || mu.sum() >= 1.0) return false;
  lambda[0] = 1.0 - mu.sum();
  for (int j = 0; j < 3; ++j) lambda[j + 1] = mu[j];
  v = w0 + edges * mu;
  return true;
}

// Johnson step: the closest point of the hull is the smallest feasible affine
// projection over the sub-simplices holding the newest vertex (index n - 1).
// Subsets without it cannot beat the previous iterate, which the caller
// already treats as convergence. Reduces the simplex to the supporting vertices.
void reduce_simplex(std::array<SupportVertex, 4>& s, int& n, std::array<double, 4>& lambda,
                    Vec3& v) {
  double best = std::numeric_limits<double>::infinity();
  int best_idx[4] = {0, 0, 0, 0};
  int best_m = 0;
  std::array<double, 4> best_lambda{};
  Vec3 best_v = Vec3::Zero();
  for (int m = 1; m <= n; ++m) {
    for (int mask = 1; mask < (1 << n); ++mask) {
      if (__builtin_popcount(mask) != m || !(mask & (1 << (n - 1)))) continue;
      int idx[4];
      int k = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) idx[k++] = i;
      std::array<double, 4> lam{};
      Vec3 cand;
      if (!affine_closest(s, idx, m, lam, cand)) continue;
      const double dd = cand.squaredNorm();
      if (dd < best) {
        best = dd;
        best_m = m;
        std::copy(idx, idx + m, best_idx);
        best_lambda = lam;
        best_v = cand;
      }
    }
  }
  std::array<SupportVertex, 4> reduced;
  for (int i = 0; i < best_m; ++i) {
    reduced[i] = s[best_idx[i]];
    lambda[i] = best_lambda[i];
  }
  s = reduced;
  n = best_m;
  v = best_v;
}

void fill_witnesses(GjkResult& r, const std::array<double, 4>& lambda) {
  r.point_a.setZero();
  r.point_b.setZero();
  for (int i = 0; i < r.simplex_size; ++i) {
    r.point_a += lambda[i] * r.simplex[i].a;
    r.point_b += lambda[i] * r.simplex[i].b;
  }
}

}  // namespace

Vec3 ConvexCore::support(const Vec3& direction) const {
  const Vec3 d = pose.rotation.conjugate() * direction;
  Vec3 local = Vec3::Zero();
  switch (kind) {
    case Kind::Point:
      break;
    case Kind::Segment:
      local.z() = d.z() >= 0.0 ? half_length : -half_length;
      break;
    case Kind::Box:
      for (int i = 0; i < 3; ++i) local[i] = d[i] >= 0.0 ? half_extents[i] : -half_extents[i];
      break;
    case Kind::Cylinder: {
      const double rho = std::hypot(d.x(), d.y());
      if (rho > 1e-300) {
        local.x() = radius * d.x() / rho;
        local.y() = radius * d.y() / rho;
      }
      local.z() = d.z() >= 0.0 ? half_length : -half_length;
      break;
    }
  }
  return pose * local;
}

ConvexCore make_core(const Primitive& shape, const Pose& pose, bool exact_cylinder) {
  ConvexCore core;
  core.pose = pose;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          core.kind = ConvexCore::Kind::Point;
          core.margin = s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          core.kind = ConvexCore::Kind::Box;
          core.half_extents = s.half_extents;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          core.kind = ConvexCore::Kind::Segment;
          core.half_length = s.half_length;
          core.margin = s.radius;
        } else {
          if (exact_cylinder) {
            core.kind = ConvexCore::Kind::Cylinder;
            core.radius = s.radius;
            core.half_length = s.half_length;
          } else {
            core.kind = ConvexCore::Kind::Segment;
            core.half_length = s.half_length;
            core.margin = s.radius;
          }
        }
      },
      shape);
  return core;
}

GjkResult gjk(const ConvexCore& a, const ConvexCore& b) {
  GjkResult r;
  Vec3 dir = a.pose.translation - b.pose.translation;
  if (dir.squaredNorm() < 1e-24) dir = Vec3::UnitX();
  r.simplex[0] = support_vertex(a, b, -dir);
  r.simplex_size = 1;
  std::array<double, 4> lambda{1.0, 0.0, 0.0, 0.0};
  Vec3 v = r.simplex[0].w;
  double lower_bound = 0.0;

  for (int iter = 0; iter < kGjkMaxIterations; ++iter) {
    r.iterations = iter + 1;
    const double vv = v.squaredNorm();
    if (vv <= kTouchDistance * kTouchDistance) {
      r.intersecting = true;
      r.distance = 0.0;
      fill_witnesses(r, lambda);
      return r;
    }
    const SupportVertex sv = support_vertex(a, b, -v);
    const double vw = v.dot(sv.w);
    lower_bound = std::max(lower_bound, vw / std::sqrt(vv));
    bool converged = vv - vw <= kGjkRelativeTolerance * vv;
    for (int i = 0; i < r.simplex_size && !converged; ++i)
      converged = (r.simplex[i].w - sv.w).squaredNorm() <= 1e-28 * (1.0 + vv);
    if (converged) {
      r.distance = std::sqrt(vv);
      fill_witnesses(r, lambda);
      return r;
    }

    const auto saved = r.simplex;
    const int saved_size = r.simplex_size;
    const auto saved_lambda = lambda;
    r.simplex[r.simplex_size++] = sv;
    Vec3 next;
    reduce_simplex(r.simplex, r.simplex_size, lambda, next);
    if (r.simplex_size == 4) {
      // Origin strictly inside the tetrahedron.
      r.intersecting = true;
      r.distance = 0.0;
      fill_witnesses(r, lambda);
      return r;
    }
    if (next.squaredNorm() >= vv) {
      r.simplex = saved;
      r.simplex_size = saved_size;
      lambda = saved_lambda;
      r.distance = std::sqrt(vv);
      fill_witnesses(r, lambda);
      return r;
    }
    v = next;
  }
  throw ConvergenceError("GJK did not converge", lower_bound);
}

namespace {

struct EpaFace {
  int v[3];
  Vec3 n;
  double dist;
  bool alive;
};

EpaFace make_face(const std::vector<SupportVertex>& verts, int i, int j, int k) {
  EpaFace f{{i, j, k}, Vec3::Zero(), std::numeric_limits<double>::infinity(), true};
  const Vec3 n = (verts[j].w - verts[i].w).cross(verts[k].w - verts[i].w);
  const double len = n.norm();
  if (len > 1e-14) {
    f.n = n / len;
    f.dist = f.n.dot(verts[i].w);
  }
  return f;
}

void orient_outward(const std::vector<SupportVertex>& verts, EpaFace& f, const Vec3& interior) {
  if (f.n.dot(verts[f.v[0]].w - interior) < 0.0) {
    std::swap(f.v[1], f.v[2]);
    f = make_face(verts, f.v[0], f.v[1], f.v[2]);
  }
}

}  // namespace

EpaResult epa(const ConvexCore& a, const ConvexCore& b, const GjkResult& seed) {
  std::vector<SupportVertex> verts(seed.simplex.begin(), seed.simplex.begin() + seed.simplex_size);
  constexpr double kSeparation = 1e-10;

  if (verts.size() == 1) {
    const Vec3 axes[6] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                          -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
    for (const Vec3& d : axes) {
      const SupportVertex sv = support_vertex(a, b, d);
      if ((sv.w - verts[0].w).norm() > kSeparation) {
        verts.push_back(sv);
        break;
      }
    }
    if (verts.size() == 1) throw GeometryError("EPA: degenerate Minkowski difference");
  }
  if (verts.size() == 2) {
    const Vec3 axis = (verts[1].w - verts[0].w).normalized();
    Eigen::Index least = 0;
    axis.cwiseAbs().minCoeff(&least);
    const Vec3 e1 = axis.cross(Vec3::Unit(least)).normalized();
    for (int k = 0; k < 6; ++k) {
      const Vec3 d = Eigen::AngleAxisd(k * M_PI / 3.0, axis) * e1;
      const SupportVertex sv = support_vertex(a, b, d);
      const Vec3 rel = sv.w - verts[0].w;
      if ((rel - rel.dot(axis) * axis).norm() > kSeparation) {
        verts.push_back(sv);
        break;
      }
    }
    if (verts.size() == 2) throw GeometryError("EPA: degenerate Minkowski difference");
  }

  std::vector<EpaFace> faces;
  if (verts.size() == 3) {
    const Vec3 n = (verts[1].w - verts[0].w).cross(verts[2].w - verts[0].w).normalized();
    const SupportVertex up = support_vertex(a, b, n);
    const SupportVertex down = support_vertex(a, b, -n);
    const bool has_up = n.dot(up.w - verts[0].w) > kSeparation;
    const bool has_down = n.dot(down.w - verts[0].w) < -kSeparation;
    if (!has_up && !has_down) throw GeometryError("EPA: degenerate Minkowski difference");
    const int base = 3;
    if (has_up) verts.push_back(up);
    if (has_down) verts.push_back(down);
    Vec3 interior = Vec3::Zero();
    for (const auto& s : verts) interior += s.w;
    interior /= static_cast<double>(verts.size());
    auto add = [&](int i, int j, int k) {
      EpaFace f = make_face(verts, i, j, k);
      orient_outward(verts, f, interior);
      faces.push_back(f);
    };
    if (has_up && has_down) {
      for (int apex : {base, base + 1}) {
        add(0, 1, apex);
        add(1, 2, apex);
        add(2, 0, apex);
      }
    } else {
      add(0, 1, 2);
      add(0, 1, base);
      add(1, 2, base);
      add(2, 0, base);
    }
  } else {
    Vec3 interior = Vec3::Zero();
    for (const auto& s : verts) interior += s.w;
    interior /= 4.0;
    const int tet[4][3] = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    for (const auto& t : tet) {
      EpaFace f = make_face(verts, t[0], t[1], t[2]);
      orient_outward(verts, f, interior);
      faces.push_back(f);
    }
  }

  int best = -1;
  std::vector<std::pair<int, int>> edges;
  while (true) {
    best = -1;
    int alive = 0;
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
      if (!faces[i].alive) continue;
      ++alive;
      if (best < 0 || faces[i].dist < faces[best].dist) best = i;
    }
    if (best < 0) throw GeometryError("EPA: empty polytope");
    if (alive > kEpaMaxFaces) break;
    const EpaFace& f = faces[best];
    const SupportVertex sv = support_vertex(a, b, f.n);
    if (f.n.dot(sv.w) - f.dist < kEpaTolerance) break;
    bool duplicate = false;
    for (const auto& s : verts) duplicate = duplicate || (s.w - sv.w).squaredNorm() < 1e-24;
    if (duplicate) break;

    const int new_index = static_cast<int>(verts.size());
    verts.push_back(sv);
    edges.clear();
    for (auto& g : faces) {
      if (!g.alive) continue;
      if (g.n.dot(sv.w - verts[g.v[0]].w) <= 1e-12) continue;
      g.alive = false;
      for (int e = 0; e < 3; ++e) {
        const int i = g.v[e];
        const int j = g.v[(e + 1) % 3];
        auto rev = std::find(edges.begin(), edges.end(), std::make_pair(j, i));
        if (rev != edges.end()) {
          edges.erase(rev);
        } else {
          edges.emplace_back(i, j);
        }
      }
    }
    if (edges.empty()) break;
    for (const auto& [i, j] : edges) faces.push_back(make_face(verts, i, j, new_index));
  }

  const EpaFace& f = faces[best];
  const Vec3 p = f.n * f.dist;
  const Vec3& v0 = verts[f.v[0]].w;
  const Vec3& v1 = verts[f.v[1]].w;
  const Vec3& v2 = verts[f.v[2]].w;
  const Vec3 e0 = v1 - v0, e1 = v2 - v0, ep = p - v0;
  const double d00 = e0.dot(e0), d01 = e0.dot(e1), d11 = e1.dot(e1);
  const double d20 = ep.dot(e0), d21 = ep.dot(e1);
  const double denom = d00 * d11 - d01 * d01;
  double l1 = denom > 0.0 ? (d11 * d20 - d01 * d21) / denom : 0.0;
  double l2 = denom > 0.0 ? (d00 * d21 - d01 * d20) / denom : 0.0;
  double l0 = 1.0 - l1 - l2;
  l0 = std::max(l0, 0.0);
  l1 = std::max(l1, 0.0);
  l2 = std::max(l2, 0.0);
  const double sum = l0 + l1 + l2;
  l0 /= sum;
  l1 /= sum;
  l2 /= sum;

  EpaResult r;
  r.depth = std::max(f.dist, 0.0);
  r.point_a = l0 * verts[f.v[0]].a + l1 * verts[f.v[1]].a + l2 * verts[f.v[2]].a;
  r.point_b = l0 * verts[f.v[0]].b + l1 * verts[f.v[1]].b + l2 * verts[f.v[2]].b;
  r.normal = -f.n;
  return r;
}

}  // namespace wbmpc::detail
