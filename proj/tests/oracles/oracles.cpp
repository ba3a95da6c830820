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
#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>

namespace wbmpc::oracle {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 unit_vector(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-9);
  return v.normalized();
}

double segment_distance(const Vec3& p, double half_length) {
  const double z = std::clamp(p.z(), -half_length, half_length);
  return (p - Vec3(0.0, 0.0, z)).norm();
}

}  // namespace

double point_signed_distance(const Primitive& shape, const Pose& pose, const Vec3& world) {
  const Vec3 p = pose.rotation.conjugate() * (world - pose.translation);
  if (const auto* s = std::get_if<Sphere>(&shape)) return p.norm() - s->radius;
  if (const auto* c = std::get_if<Capsule>(&shape)) return segment_distance(p, c->half_length) - c->radius;
  if (const auto* b = std::get_if<Box>(&shape)) {
    const Vec3 q = p.cwiseAbs() - b->half_extents;
    return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
  }
  const auto& c = std::get<Cylinder>(shape);
  const Eigen::Vector2d q(std::hypot(p.x(), p.y()) - c.radius, std::abs(p.z()) - c.half_length);
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

std::vector<Vec3> surface_samples(const Primitive& shape, const Pose& pose, int count, Rng& rng) {
  std::vector<Vec3> local;
  local.reserve(count + 16);
  const double two_pi = 2.0 * std::numbers::pi;
  const int feature_count = count / 10;
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    for (int i = 0; i < count; ++i) local.push_back(s->radius * unit_vector(rng));
  } else if (const auto* b = std::get_if<Box>(&shape)) {
    const Vec3 h = b->half_extents;
    const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
    std::discrete_distribution<int> face({areas[0], areas[0], areas[1], areas[1], areas[2], areas[2]});
    for (int i = 0; i < count - feature_count; ++i) {
      const int f = face(rng);
      const int axis = f / 2;
      Vec3 p(uniform(rng, -h.x(), h.x()), uniform(rng, -h.y(), h.y()), uniform(rng, -h.z(), h.z()));
      p[axis] = f % 2 == 0 ? h[axis] : -h[axis];
      local.push_back(p);
    }
    // Edges and corners.
    for (int i = 0; i < feature_count; ++i) {
      const int axis = i % 3;
      Vec3 p;
      for (int a = 0; a < 3; ++a)
        p[a] = a == axis ? uniform(rng, -h[a], h[a]) : (uniform(rng, 0.0, 1.0) < 0.5 ? h[a] : -h[a]);
      local.push_back(p);
    }
    for (int c = 0; c < 8; ++c)
      local.emplace_back(c & 1 ? h.x() : -h.x(), c & 2 ? h.y() : -h.y(), c & 4 ? h.z() : -h.z());
  } else if (const auto* c = std::get_if<Cylinder>(&shape)) {
    const double r = c->radius, hl = c->half_length;
    const double side = two_pi * r * 2.0 * hl, cap = std::numbers::pi * r * r;
    std::discrete_distribution<int> part({side, cap, cap});
    for (int i = 0; i < count - feature_count; ++i) {
      const double phi = uniform(rng, 0.0, two_pi);
      const int k = part(rng);
      if (k == 0) {
        local.emplace_back(r * std::cos(phi), r * std::sin(phi), uniform(rng, -hl, hl));
      } else {
        const double rho = r * std::sqrt(uniform(rng, 0.0, 1.0));
        local.emplace_back(rho * std::cos(phi), rho * std::sin(phi), k == 1 ? hl : -hl);
      }
    }
    for (int i = 0; i < feature_count; ++i) {
      const double phi = uniform(rng, 0.0, two_pi);
      local.emplace_back(r * std::cos(phi), r * std::sin(phi), i % 2 == 0 ? hl : -hl);
    }
  } else {
    const auto& cap = std::get<Capsule>(shape);
    const double r = cap.radius, hl = cap.half_length;
    const double side = two_pi * r * 2.0 * hl, ends = 4.0 * std::numbers::pi * r * r;
    std::discrete_distribution<int> part({side, ends});
    for (int i = 0; i < count; ++i) {
      if (part(rng) == 0) {
        const double phi = uniform(rng, 0.0, two_pi);
        local.emplace_back(r * std::cos(phi), r * std::sin(phi), uniform(rng, -hl, hl));
      } else {
        const Vec3 u = unit_vector(rng);
        local.push_back(r * u + Vec3(0.0, 0.0, u.z() >= 0.0 ? hl : -hl));
      }
    }
  }
  std::vector<Vec3> world;
  world.reserve(local.size());
  for (const Vec3& p : local) world.push_back(pose * p);
  return world;
}

double sampled_separation(const Primitive& a, const Pose& pose_a, const Primitive& b,
                          const Pose& pose_b, int samples_per_shape, Rng& rng) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : surface_samples(a, pose_a, samples_per_shape, rng))
    best = std::min(best, point_signed_distance(b, pose_b, p));
  for (const Vec3& p : surface_samples(b, pose_b, samples_per_shape, rng))
    best = std::min(best, point_signed_distance(a, pose_a, p));
  return best;
}

double coverage_gap(const Primitive& shape, const Decomposition& spheres, int samples, Rng& rng) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec3& p : surface_samples(shape, Pose(), samples, rng)) {
    double best = std::numeric_limits<double>::infinity();
    for (const LocalSphere& s : spheres.spheres) best = std::min(best, (p - s.center).norm() - s.radius);
    worst = std::max(worst, best);
  }
  return worst;
}

double sampled_protrusion(const Primitive& shape, const Decomposition& spheres, int samples, Rng& rng) {
  double worst = -std::numeric_limits<double>::infinity();
  const int per_sphere = std::max<int>(1, samples / static_cast<int>(spheres.spheres.size()));
  for (const LocalSphere& s : spheres.spheres)
    for (int i = 0; i < per_sphere; ++i)
      worst = std::max(worst, point_signed_distance(shape, Pose(), s.center + s.radius * unit_vector(rng)));
  return worst;
}

Primitive random_primitive(Rng& rng, bool with_capsule) {
  const int kind = std::uniform_int_distribution<int>(0, with_capsule ? 3 : 2)(rng);
  const auto dim = [&] { return uniform(rng, 0.05, 0.4); };
  switch (kind) {
    case 0:
      return Sphere{dim()};
    case 1:
      return Box{Vec3(dim(), dim(), dim())};
    case 2:
      return Cylinder{dim(), dim()};
    default:
      return Capsule{dim(), dim()};
  }
}

Pose random_pose(Rng& rng, double spread) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return {Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
               uniform(rng, -spread, spread)),
          q};
}

std::vector<double> brute_force_esdf(const OccupancyGrid& occupancy) {
  const GridGeometry& g = occupancy.geometry;
  std::vector<Vec3> occupied, free;
  for (std::size_t v = 0; v < g.size(); ++v)
    (occupancy.occupied[v] ? occupied : free).push_back(g.center(v));
  const double half = 0.5 * g.resolution, cap = g.cap();
  std::vector<double> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const Vec3 c = g.center(v);
    const bool occ = occupancy.occupied[v] != 0;
    const std::vector<Vec3>& others = occ ? free : occupied;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& o : others) best = std::min(best, (o - c).squaredNorm());
    if (others.empty()) {
      out[v] = occ ? -cap : cap;
    } else {
      const double d = std::sqrt(best);
      out[v] = occ ? std::max(-cap, -d + half) : std::min(cap, d - half);
    }
  }
  return out;
}

std::vector<Eigen::Matrix4d> chained_frames(const RobotModel& model, const Configuration& q) {
  const auto homogeneous = [](const Mat3& r, const Vec3& t) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = t;
    return m;
  };
  std::vector<Eigen::Matrix4d> out(model.num_links());
  std::vector<bool> done(model.num_links(), false);
  const std::function<const Eigen::Matrix4d&(int)> frame = [&](int i) -> const Eigen::Matrix4d& {
    if (done[i]) return out[i];
    const Link& l = model.link(i);
    if (l.parent < 0) {
      out[i] = homogeneous(q.base.rotation.toRotationMatrix(), q.base.translation);
    } else {
      Eigen::Matrix4d motion = Eigen::Matrix4d::Identity();
      if (l.joint.type == JointType::Revolute)
        motion = homogeneous(Eigen::AngleAxisd(q.joints[l.dof], l.joint.axis).toRotationMatrix(),
                             Vec3::Zero());
      else if (l.joint.type == JointType::Prismatic)
        motion = homogeneous(Mat3::Identity(), l.joint.axis * q.joints[l.dof]);
      out[i] = frame(l.parent) *
               homogeneous(l.joint.origin.rotation.toRotationMatrix(), l.joint.origin.translation) *
               motion;
    }
    done[i] = true;
    return out[i];
  };
  for (int i = model.num_links() - 1; i >= 0; --i) frame(i);
  return out;
}

Configuration random_configuration(const RobotModel& model, Rng& rng, double joint_range,
                                   double base_spread) {
  Configuration q = Configuration::zero(model);
  q.base = random_pose(rng, base_spread);
  for (Eigen::Index i = 0; i < q.joints.size(); ++i) q.joints[i] = uniform(rng, -joint_range, joint_range);
  return q;
}

VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x,
                     double step) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

VectorXd fd_tangent_gradient(const std::function<double(const Configuration&)>& f,
                             const Configuration& q, double step) {
  const int n = 6 + static_cast<int>(q.joints.size());
  VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    const VectorXd e = VectorXd::Unit(n, i) * step;
    g[i] = (f(retract(q, e)) - f(retract(q, -e))) / (2.0 * step);
  }
  return g;
}

MatrixXd fd_tangent_jacobian(const std::function<Vec3(const Configuration&)>& f,
                             const Configuration& q, double step) {
  const int n = 6 + static_cast<int>(q.joints.size());
  MatrixXd jac(3, n);
  for (int i = 0; i < n; ++i) {
    const VectorXd e = VectorXd::Unit(n, i) * step;
    jac.col(i) = (f(retract(q, e)) - f(retract(q, -e))) / (2.0 * step);
  }
  return jac;
}

void rk4_discretize(const MatrixXd& A, const MatrixXd& B, double h, MatrixXd& Ad, MatrixXd& Bd) {
  const Eigen::Index n = A.rows(), m = B.cols();
  const auto step = [&](const VectorXd& x, const VectorXd& u) {
    const auto f = [&](const VectorXd& s) -> VectorXd { return A * s + B * u; };
    const VectorXd k1 = f(x);
    const VectorXd k2 = f(x + 0.5 * h * k1);
    const VectorXd k3 = f(x + 0.5 * h * k2);
    const VectorXd k4 = f(x + h * k3);
    return VectorXd(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  Ad.resize(n, n);
  Bd.resize(n, m);
  for (Eigen::Index j = 0; j < n; ++j) Ad.col(j) = step(VectorXd::Unit(n, j), VectorXd::Zero(m));
  for (Eigen::Index j = 0; j < m; ++j) Bd.col(j) = step(VectorXd::Zero(n), VectorXd::Unit(m, j));
}

BatchSolution solve_batch_lq(const LqInstance& p) {
  const int N = p.nodes;
  const Eigen::Index n = p.A.rows(), m = p.B.cols();
  const double dt = p.horizon / N;
  MatrixXd Ad, Bd;
  rk4_discretize(p.A, p.B, dt, Ad, Bd);

  // x_k = c_k + M_k U
  std::vector<VectorXd> c(N + 1);
  std::vector<MatrixXd> M(N + 1);
  c[0] = p.x0;
  M[0] = MatrixXd::Zero(n, N * m);
  for (int k = 0; k < N; ++k) {
    c[k + 1] = Ad * c[k];
    M[k + 1] = Ad * M[k];
    M[k + 1].middleCols(k * m, m) += Bd;
  }
  MatrixXd H = MatrixXd::Zero(N * m, N * m);
  VectorXd g = VectorXd::Zero(N * m);
  for (int k = 0; k <= N; ++k) {
    const MatrixXd W = k < N ? MatrixXd(dt * p.Q) : p.Qf;
    H += M[k].transpose() * W * M[k];
    g += M[k].transpose() * W * (c[k] - p.x_ref);
  }
  for (int k = 0; k < N; ++k) {
    H.block(k * m, k * m, m, m) += dt * p.R;
    g.segment(k * m, m) -= dt * p.R * p.u_ref;
  }
  const VectorXd U = H.ldlt().solve(-g);

  BatchSolution out;
  VectorXd x = p.x0;
  for (int k = 0; k < N; ++k) {
    const VectorXd u = U.segment(k * m, m);
    out.inputs.push_back(u);
    out.cost += dt * ((x - p.x_ref).dot(p.Q * (x - p.x_ref)) + (u - p.u_ref).dot(p.R * (u - p.u_ref)));
    x = Ad * x + Bd * u;
  }
  out.cost += (x - p.x_ref).dot(p.Qf * (x - p.x_ref));
  return out;
}

}  // namespace wbmpc::oracle
