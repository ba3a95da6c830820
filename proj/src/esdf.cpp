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
#include "wbmpc/esdf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json_util.hpp"

namespace wbmpc {

using detail::SiteField;
using nlohmann::json;

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

}  // namespace

Scene Scene::from_json(const json& doc) {
  Scene scene;
  scene.resolution = json_util::get<double>(doc, "resolution", "scene");
  if (!(scene.resolution > 0.0)) throw ModelError("scene: field 'resolution' must be > 0");
  if (doc.contains("boxes")) {
    int n = 0;
    for (const auto& b : doc.at("boxes")) {
      const std::string ctx = "scene.boxes[" + std::to_string(n++) + "]";
      SceneBox box;
      box.name = json_util::get_or<std::string>(b, "name", "box" + std::to_string(n - 1), ctx);
      box.center = json_util::vec3(json_util::require(b, "center", ctx), ctx + ".center");
      box.size = json_util::vec3(json_util::require(b, "size", ctx), ctx + ".size");
      if (!(box.size.minCoeff() > 0.0)) throw ModelError(ctx + ": field 'size' must be positive");
      if (b.contains("velocity")) box.velocity = json_util::vec3(b.at("velocity"), ctx + ".velocity");
      scene.boxes.push_back(box);
    }
  }
  if (doc.contains("points")) {
    for (const auto& p : doc.at("points")) scene.points.push_back(json_util::vec3(p, "scene.points[]"));
  }
  if (doc.contains("workspace")) {
    const auto& w = doc.at("workspace");
    scene.has_workspace = true;
    scene.workspace_min = json_util::vec3(json_util::require(w, "min", "scene.workspace"), "scene.workspace.min");
    scene.workspace_max = json_util::vec3(json_util::require(w, "max", "scene.workspace"), "scene.workspace.max");
    if (!(scene.workspace_max.array() > scene.workspace_min.array()).all())
      throw ModelError("scene.workspace: 'max' must exceed 'min'");
  }
  scene.horizon = json_util::get_or<double>(doc, "horizon", 0.0, "scene");
  return scene;
}

Scene Scene::load(const std::filesystem::path& path) { return from_json(json_util::read_file(path)); }

Eigen::Vector3i GridGeometry::coords(std::size_t index) const {
  const int i = static_cast<int>(index % dims.x());
  const std::size_t rest = index / dims.x();
  return {i, static_cast<int>(rest % dims.y()), static_cast<int>(rest / dims.y())};
}

Vec3 GridGeometry::center(std::size_t index) const {
  const Eigen::Vector3i c = coords(index);
  return center(c.x(), c.y(), c.z());
}

GridGeometry grid_for(const Scene& scene, double resolution) {
  if (!(resolution > 0.0)) throw ModelError("grid resolution must be > 0");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  auto grow = [&](const Vec3& a, const Vec3& b) {
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(b);
  };
  for (const auto& b : scene.boxes) {
    grow(b.center_at(0.0) - 0.5 * b.size, b.center_at(0.0) + 0.5 * b.size);
    grow(b.center_at(scene.horizon) - 0.5 * b.size, b.center_at(scene.horizon) + 0.5 * b.size);
  }
  for (const auto& p : scene.points) grow(p, p);
  if (scene.has_workspace) grow(scene.workspace_min, scene.workspace_max);
  if (!std::isfinite(lo.x())) lo = hi = Vec3::Zero();

  constexpr int kPad = 2;
  GridGeometry g;
  g.resolution = resolution;
  for (int a = 0; a < 3; ++a) {
    const long first = static_cast<long>(std::floor(lo[a] / resolution)) - kPad;
    const long last = static_cast<long>(std::ceil(hi[a] / resolution)) + kPad;
    g.origin[a] = static_cast<double>(first) * resolution;
    g.dims[a] = static_cast<int>(std::max(1L, last - first));
  }
  return g;
}

std::size_t OccupancyGrid::count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

OccupancyGrid build_occupancy(const Scene& scene, const GridGeometry& g, double t) {
  OccupancyGrid occ{g, std::vector<std::uint8_t>(g.size(), 0)};
  // Voxel index range whose centers fall in [lo, hi].
  auto range = [&](double lo, double hi, int axis, int& first, int& last) {
    const double r = g.resolution;
    first = std::max(0, static_cast<int>(std::ceil((lo - g.origin[axis]) / r - 0.5)));
    last = std::min(g.dims[axis] - 1, static_cast<int>(std::floor((hi - g.origin[axis]) / r - 0.5)));
    // Guard the rounding of the index estimates with the exact comparison.
    while (first <= last && g.origin[axis] + (first + 0.5) * r < lo) ++first;
    while (first > 0 && g.origin[axis] + (first - 0.5) * r >= lo) --first;
    while (last >= first && g.origin[axis] + (last + 0.5) * r > hi) --last;
    while (last + 1 < g.dims[axis] && g.origin[axis] + (last + 1.5) * r <= hi) ++last;
  };
  auto fill = [&](const Vec3& lo, const Vec3& hi, const Vec3* point) {
    int f[3], l[3];
    for (int a = 0; a < 3; ++a) range(lo[a], hi[a], a, f[a], l[a]);
    for (int k = f[2]; k <= l[2]; ++k)
      for (int j = f[1]; j <= l[1]; ++j)
        for (int i = f[0]; i <= l[0]; ++i) {
          if (point && (g.center(i, j, k) - *point).norm() > 0.5 * g.resolution) continue;
          occ.occupied[g.index(i, j, k)] = 1;
        }
  };
  for (const auto& b : scene.boxes) {
    const Vec3 c = b.center_at(t);
    fill(c - 0.5 * b.size, c + 0.5 * b.size, nullptr);
  }
  const Vec3 half = Vec3::Constant(0.5 * g.resolution);
  for (const auto& p : scene.points) fill(p - half, p + half, &p);
  return occ;
}

OccupancyGrid build_occupancy(const Scene& scene, double resolution) {
  return build_occupancy(scene, grid_for(scene, resolution), 0.0);
}

OccupancyChange occupancy_diff(const OccupancyGrid& before, const OccupancyGrid& after) {
  if (!(before.geometry == after.geometry)) throw DimensionError("occupancy grids differ in geometry");
  OccupancyChange change;
  for (std::size_t v = 0; v < before.occupied.size(); ++v) {
    if (before.occupied[v] == after.occupied[v]) continue;
    (after.occupied[v] ? change.occupied : change.freed).push_back(v);
  }
  return change;
}

namespace {

// Lower envelope of parabolas (Felzenszwalb and Huttenlocher) along one axis,
// carrying the site of the winning parabola.
void transform_axis(SiteField& field, const GridGeometry& g, int axis) {
  const int n = g.dims[axis];
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? g.dims.x() : static_cast<std::size_t>(g.dims.x()) * g.dims.y();
  std::vector<std::int64_t> f(n), d(n);
  std::vector<std::int32_t> s(n), out_site(n);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);

  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  for (int c2 = 0; c2 < g.dims[a2]; ++c2) {
    for (int c1 = 0; c1 < g.dims[a1]; ++c1) {
      Eigen::Vector3i start;
      start[axis] = 0;
      start[a1] = c1;
      start[a2] = c2;
      const std::size_t base = g.index(start.x(), start.y(), start.z());
      for (int q = 0; q < n; ++q) {
        f[q] = field.sq[base + q * stride];
        s[q] = field.site[base + q * stride];
      }
      int k = -1;
      for (int q = 0; q < n; ++q) {
        if (f[q] >= kInf) continue;
        if (k < 0) {
          k = 0;
          v[0] = q;
          z[0] = -std::numeric_limits<double>::infinity();
          z[1] = std::numeric_limits<double>::infinity();
          continue;
        }
        double sx;
        for (;;) {
          const int p = v[k];
          sx = static_cast<double>((f[q] + std::int64_t{q} * q) - (f[p] + std::int64_t{p} * p)) /
               (2.0 * (q - p));
          if (sx <= z[k]) {
            --k;  // z[0] is -inf, so k stays >= 0
          } else {
            break;
          }
        }
        ++k;
        v[k] = q;
        z[k] = sx;
        z[k + 1] = std::numeric_limits<double>::infinity();
      }
      if (k < 0) continue;  // no site reaches this line yet
      k = 0;
      for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const std::int64_t dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
        out_site[q] = s[v[k]];
      }
      for (int q = 0; q < n; ++q) {
        field.sq[base + q * stride] = d[q];
        field.site[base + q * stride] = out_site[q];
      }
    }
  }
}

SiteField compute_sites(const std::vector<std::uint8_t>& occupied, std::uint8_t site_value,
                        const GridGeometry& g) {
  SiteField field;
  field.sq.assign(g.size(), kInf);
  field.site.assign(g.size(), SiteField::kNone);
  for (std::size_t v = 0; v < occupied.size(); ++v) {
    if (occupied[v] == site_value) {
      field.sq[v] = 0;
      field.site[v] = static_cast<std::int32_t>(v);
    }
  }
  for (int axis = 0; axis < 3; ++axis) transform_axis(field, g, axis);
  return field;
}

}  // namespace

void EsdfGrid::refresh_distance(std::size_t v) {
  const GridGeometry& g = geometry();
  const double cap = g.cap(), r = g.resolution;
  if (occupancy_.occupied[v]) {
    const std::int64_t sq = to_free_.sq[v];
    distance_[v] = sq >= kInf ? -cap : std::max(-cap, -std::sqrt(static_cast<double>(sq)) * r + 0.5 * r);
  } else {
    const std::int64_t sq = to_occupied_.sq[v];
    distance_[v] = sq >= kInf ? cap : std::min(cap, std::sqrt(static_cast<double>(sq)) * r - 0.5 * r);
  }
}

void EsdfGrid::refresh_gradient(std::size_t v) {
  const GridGeometry& g = geometry();
  const Eigen::Vector3i c = g.coords(v);
  Vec3 grad;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3i lo = c, hi = c;
    if (c[a] > 0) --lo[a];
    if (c[a] + 1 < g.dims[a]) ++hi[a];
    const int span = hi[a] - lo[a];
    grad[a] = span == 0 ? 0.0
                        : (distance_[g.index(hi.x(), hi.y(), hi.z())] -
                           distance_[g.index(lo.x(), lo.y(), lo.z())]) /
                              (span * g.resolution);
  }
  gradient_[v] = grad;
}

EsdfGrid compute_esdf(const OccupancyGrid& occupancy) {
  const GridGeometry& g = occupancy.geometry;
  if (occupancy.occupied.size() != g.size()) throw DimensionError("occupancy size does not match its dims");
  EsdfGrid out;
  out.occupancy_ = occupancy;
  out.to_occupied_ = compute_sites(occupancy.occupied, 1, g);
  out.to_free_ = compute_sites(occupancy.occupied, 0, g);
  out.has_sites_ = true;
  out.distance_.resize(g.size());
  out.gradient_.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) out.refresh_distance(v);
  for (std::size_t v = 0; v < g.size(); ++v) out.refresh_gradient(v);
  return out;
}

EsdfGrid EsdfGrid::from_distances(const GridGeometry& geometry, std::vector<double> distances) {
  if (distances.size() != geometry.size()) throw DimensionError("lattice size does not match dims");
  EsdfGrid out;
  out.occupancy_.geometry = geometry;
  out.occupancy_.occupied.resize(geometry.size());
  for (std::size_t v = 0; v < distances.size(); ++v) out.occupancy_.occupied[v] = distances[v] <= 0.0;
  out.distance_ = std::move(distances);
  out.gradient_.resize(geometry.size());
  for (std::size_t v = 0; v < geometry.size(); ++v) out.refresh_gradient(v);
  return out;
}

namespace {

struct Offset {
  std::array<int, 3> d;
  std::int64_t sq;
};

// Offsets inside a ball, nearest first, for re-resolving voxels whose site was removed.
const std::vector<Offset>& sorted_offsets() {
  static const std::vector<Offset> table = [] {
    constexpr int R = 32;
    std::vector<Offset> t;
    for (int x = -R; x <= R; ++x)
      for (int y = -R; y <= R; ++y)
        for (int z = -R; z <= R; ++z) {
          const std::int64_t sq = x * x + y * y + z * z;
          if (sq <= R * R) t.push_back({{x, y, z}, sq});
        }
    std::stable_sort(t.begin(), t.end(), [](const Offset& a, const Offset& b) { return a.sq < b.sq; });
    return t;
  }();
  return table;
}

class SiteUpdater {
 public:
  SiteUpdater(SiteField& field, const GridGeometry& g, std::vector<std::uint32_t>& stamp,
              std::uint32_t& stamp_id, std::vector<std::size_t>& changed, std::size_t& budget)
      : field_(field), g_(g), stamp_(stamp), stamp_id_(stamp_id), changed_(changed), budget_(budget) {}

  // Exact: a voxel that the new site claims is joined to it by a lattice path
  // whose voxels all satisfy |w - s| < D(w) + sqrt(3).
  // Returns false when the work budget runs out.
  bool insert(std::size_t s) {
    if (field_.sq[s] == 0) return true;
    const Eigen::Vector3i cs = g_.coords(s);
    const std::uint32_t id = ++stamp_id_;
    queue_.clear();
    queue_.push_back(s);
    stamp_[s] = id;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      if (budget_ == 0) return false;
      --budget_;
      const std::size_t u = queue_[head];
      const Eigen::Vector3i cu = g_.coords(u);
      const std::int64_t d2 = (cu - cs).cast<std::int64_t>().squaredNorm();
      if (d2 < field_.sq[u]) {
        field_.sq[u] = d2;
        field_.site[u] = static_cast<std::int32_t>(s);
        changed_.push_back(u);
      }
      for (int a = 0; a < 3; ++a) {
        for (int step : {-1, 1}) {
          Eigen::Vector3i cw = cu;
          cw[a] += step;
          if (cw[a] < 0 || cw[a] >= g_.dims[a]) continue;
          const std::size_t w = g_.index(cw.x(), cw.y(), cw.z());
          if (stamp_[w] == id) continue;
          const std::int64_t sq_w = field_.sq[w];
          if (sq_w < kInf) {
            const double dist = std::sqrt(static_cast<double>((cw - cs).cast<std::int64_t>().squaredNorm()));
            if (dist >= std::sqrt(static_cast<double>(sq_w)) + std::sqrt(3.0) + 1e-9) continue;
          }
          stamp_[w] = id;
          queue_.push_back(w);
        }
      }
    }
    return true;
  }

  // Returns false when the caller should fall back to a full recompute.
  bool remove(const std::vector<std::size_t>& removed, const std::vector<std::uint8_t>& is_site,
              std::size_t remaining_sites) {
    if (removed.empty()) return true;
    const std::uint32_t id = ++stamp_id_;
    for (std::size_t r : removed) stamp_[r] = id;
    std::vector<std::size_t> affected;
    for (std::size_t u = 0; u < field_.site.size(); ++u) {
      const std::int32_t s = field_.site[u];
      if (s != SiteField::kNone && stamp_[s] == id) affected.push_back(u);
    }
    if (remaining_sites == 0) {
      for (std::size_t u : affected) {
        field_.sq[u] = kInf;
        field_.site[u] = SiteField::kNone;
        changed_.push_back(u);
      }
      return true;
    }
    if (affected.size() > budget_) return false;
    const auto& offsets = sorted_offsets();
    for (std::size_t u : affected) {
      const Eigen::Vector3i cu = g_.coords(u);
      // Removing sites only lengthens distances: start at the old radius.
      auto it = std::lower_bound(offsets.begin(), offsets.end(), field_.sq[u],
                                 [](const Offset& o, std::int64_t sq) { return o.sq < sq; });
      bool found = false;
      for (; it != offsets.end(); ++it) {
        if (budget_ == 0) return false;
        --budget_;
        const Eigen::Vector3i cw(cu.x() + it->d[0], cu.y() + it->d[1], cu.z() + it->d[2]);
        if ((cw.array() < 0).any() || (cw.array() >= g_.dims.array()).any()) continue;
        const std::size_t w = g_.index(cw.x(), cw.y(), cw.z());
        if (!is_site[w]) continue;
        field_.sq[u] = it->sq;
        field_.site[u] = static_cast<std::int32_t>(w);
        found = true;
        break;
      }
      if (!found) return false;  // nearest site lies beyond the offset table
      changed_.push_back(u);
    }
    return true;
  }

 private:
  SiteField& field_;
  const GridGeometry& g_;
  std::vector<std::uint32_t>& stamp_;
  std::uint32_t& stamp_id_;
  std::vector<std::size_t>& changed_;
  std::size_t& budget_;
  std::vector<std::size_t> queue_;
};

}  // namespace

EsdfGrid update_esdf(const EsdfGrid& esdf, const OccupancyChange& change) {
  if (!esdf.has_sites_) throw Error("update_esdf needs a grid built by compute_esdf");
  const GridGeometry& g = esdf.geometry();
  const std::size_t n = g.size();
  EsdfGrid out = esdf;

  std::vector<std::size_t> added, freed;
  for (std::size_t v : change.occupied) {
    if (v >= n) throw DimensionError("changed voxel index out of range");
    if (!out.occupancy_.occupied[v]) {
      out.occupancy_.occupied[v] = 1;
      added.push_back(v);
    }
  }
  for (std::size_t v : change.freed) {
    if (v >= n) throw DimensionError("changed voxel index out of range");
    if (out.occupancy_.occupied[v]) {
      out.occupancy_.occupied[v] = 0;
      freed.push_back(v);
    }
  }
  if (added.empty() && freed.empty()) return out;
  if (added.size() + freed.size() > n / 8) return compute_esdf(out.occupancy_);

  const std::size_t occupied_count = out.occupancy_.count();
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t stamp_id = 0;
  std::vector<std::size_t> changed(added.begin(), added.end());
  changed.insert(changed.end(), freed.begin(), freed.end());

  std::vector<std::uint8_t> free_mask(n);
  for (std::size_t v = 0; v < n; ++v) free_mask[v] = !out.occupancy_.occupied[v];

  // Past this much work the exact full transform is cheaper.
  std::size_t budget = n / 8 + 1024;
  SiteUpdater occ(out.to_occupied_, g, stamp, stamp_id, changed, budget);
  for (std::size_t v : added)
    if (!occ.insert(v)) return compute_esdf(out.occupancy_);
  if (!occ.remove(freed, out.occupancy_.occupied, occupied_count)) return compute_esdf(out.occupancy_);

  SiteUpdater fre(out.to_free_, g, stamp, stamp_id, changed, budget);
  for (std::size_t v : freed)
    if (!fre.insert(v)) return compute_esdf(out.occupancy_);
  if (!fre.remove(added, free_mask, n - occupied_count)) return compute_esdf(out.occupancy_);

  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  for (std::size_t v : changed) out.refresh_distance(v);
  // Central differences reach one voxel out.
  std::vector<std::size_t> touched;
  touched.reserve(changed.size() * 7);
  for (std::size_t v : changed) {
    touched.push_back(v);
    const Eigen::Vector3i c = g.coords(v);
    for (int a = 0; a < 3; ++a)
      for (int step : {-1, 1}) {
        Eigen::Vector3i w = c;
        w[a] += step;
        if (w[a] >= 0 && w[a] < g.dims[a]) touched.push_back(g.index(w.x(), w.y(), w.z()));
      }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (std::size_t v : touched) out.refresh_gradient(v);
  return out;
}

namespace {

// Continuous voxel coordinate of p along an axis. Values within rounding of
// a voxel center snap onto it, so centers (including border ones) query exactly.
double cell_coordinate(const GridGeometry& g, const Vec3& p, int axis) {
  const double x = (p[axis] - g.origin[axis]) / g.resolution - 0.5;
  const double nearest = std::round(x);
  return std::abs(x - nearest) < 1e-9 ? nearest : x;
}

}  // namespace

bool EsdfGrid::interpolable(const Vec3& p) const {
  const GridGeometry& g = geometry();
  for (int a = 0; a < 3; ++a) {
    const double x = cell_coordinate(g, p, a);
    if (!(x >= 0.0 && x <= g.dims[a] - 1) || g.dims[a] < 2) return false;
  }
  return true;
}

EsdfSample EsdfGrid::query(const Vec3& p) const {
  const GridGeometry& g = geometry();
  int i0[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    const double x = cell_coordinate(g, p, a);
    if (!(x >= 0.0 && x <= g.dims[a] - 1) || g.dims[a] < 2)
      throw OutsideField("outside field: point (" + std::to_string(p.x()) + ", " +
                         std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")");
    i0[a] = std::min(static_cast<int>(std::floor(x)), g.dims[a] - 2);
    t[a] = x - i0[a];
  }
  double c[2][2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) c[dx][dy][dz] = distance_[g.index(i0[0] + dx, i0[1] + dy, i0[2] + dz)];
  const double tx = t[0], ty = t[1], tz = t[2];
  // Blend along x, then y, then z.
  double cx[2][2], dcx[2][2];
  for (int dy = 0; dy < 2; ++dy)
    for (int dz = 0; dz < 2; ++dz) {
      cx[dy][dz] = (1 - tx) * c[0][dy][dz] + tx * c[1][dy][dz];
      dcx[dy][dz] = c[1][dy][dz] - c[0][dy][dz];
    }
  double cxy[2], dcxy_x[2], dcxy_y[2];
  for (int dz = 0; dz < 2; ++dz) {
    cxy[dz] = (1 - ty) * cx[0][dz] + ty * cx[1][dz];
    dcxy_x[dz] = (1 - ty) * dcx[0][dz] + ty * dcx[1][dz];
    dcxy_y[dz] = cx[1][dz] - cx[0][dz];
  }
  EsdfSample out;
  out.distance = (1 - tz) * cxy[0] + tz * cxy[1];
  out.gradient = Vec3((1 - tz) * dcxy_x[0] + tz * dcxy_x[1], (1 - tz) * dcxy_y[0] + tz * dcxy_y[1],
                      cxy[1] - cxy[0]) /
                 g.resolution;
  return out;
}

namespace {

std::filesystem::path header_path(const std::filesystem::path& path) {
  std::filesystem::path h = path;
  h += ".json";
  return h;
}

}  // namespace

void export_grid(const EsdfGrid& esdf, const std::filesystem::path& path) {
  const GridGeometry& g = esdf.geometry();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (double d : esdf.distances()) {
    const float f = static_cast<float>(d);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    const unsigned char bytes[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                    static_cast<unsigned char>(bits >> 16),
                                    static_cast<unsigned char>(bits >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");

  json header = {{"origin", json_util::to_json(g.origin)},
                 {"resolution", g.resolution},
                 {"dims", {g.dims.x(), g.dims.y(), g.dims.z()}},
                 {"encoding", "float32-le"},
                 {"order", "x-fastest"}};
  std::ofstream h(header_path(path));
  if (!h) throw Error("cannot write '" + header_path(path).string() + "'");
  h << header.dump(2) << "\n";
}

std::vector<float> read_grid_lattice(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<float> values;
  unsigned char bytes[4];
  while (in.read(reinterpret_cast<char*>(bytes), 4)) {
    const std::uint32_t bits = std::uint32_t{bytes[0]} | (std::uint32_t{bytes[1]} << 8) |
                               (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 24);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    values.push_back(f);
  }
  if (in.gcount() != 0) throw Error("'" + path.string() + "': truncated lattice");
  return values;
}

EsdfGrid import_grid(const std::filesystem::path& path) {
  const json header = json_util::read_file(header_path(path));
  GridGeometry g;
  g.origin = json_util::vec3(json_util::require(header, "origin", "grid header"), "grid header.origin");
  g.resolution = json_util::get<double>(header, "resolution", "grid header");
  const auto dims = json_util::get<std::vector<int>>(header, "dims", "grid header");
  if (dims.size() != 3 || *std::min_element(dims.begin(), dims.end()) < 1)
    throw ModelError("grid header: field 'dims' must hold 3 positive integers");
  g.dims = {dims[0], dims[1], dims[2]};
  const std::vector<float> lattice = read_grid_lattice(path);
  if (lattice.size() != g.size()) throw DimensionError("grid lattice size does not match header dims");

  OccupancyGrid occ{g, std::vector<std::uint8_t>(g.size())};
  for (std::size_t v = 0; v < lattice.size(); ++v) occ.occupied[v] = lattice[v] <= 0.0f;
  EsdfGrid out = compute_esdf(occ);
  for (std::size_t v = 0; v < lattice.size(); ++v) {
    if (static_cast<float>(out.distance(v)) != lattice[v])
      throw Error("grid '" + path.string() + "' is not a distance field of its own occupancy");
  }
  return out;
}

}  // namespace wbmpc
