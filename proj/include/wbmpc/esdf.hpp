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
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbmpc/common.hpp"

namespace wbmpc {

class OutsideField : public Error {
 public:
  using Error::Error;
};

struct SceneBox {
  std::string name;
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  Vec3 velocity = Vec3::Zero();  // m/s, for moving obstacles

  Vec3 center_at(double t) const { return center + velocity * t; }
};

/// World-frame obstacles. `workspace` bounds, when present, are merged into
/// the grid extent so the field covers where the robot can go.
struct Scene {
  std::vector<SceneBox> boxes;
  std::vector<Vec3> points;
  double resolution = 0.1;
  bool has_workspace = false;
  Vec3 workspace_min = Vec3::Zero();
  Vec3 workspace_max = Vec3::Zero();
  /// Duration over which moving boxes are swept when sizing the grid.
  double horizon = 0.0;

  static Scene from_json(const nlohmann::json& document);
  static Scene load(const std::filesystem::path& path);
};

/// Voxel (i, j, k) spans origin + [i, i+1) * resolution along x, and so on.
struct GridGeometry {
  Vec3 origin = Vec3::Zero();
  double resolution = 0.1;
  Eigen::Vector3i dims = Eigen::Vector3i::Ones();

  std::size_t size() const {
    return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims.x()) * (j + static_cast<std::size_t>(dims.y()) * k);
  }
  Eigen::Vector3i coords(std::size_t index) const;
  Vec3 center(int i, int j, int k) const {
    return origin + resolution * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  Vec3 center(std::size_t index) const;
  /// Largest representable distance: the grid diagonal.
  double cap() const { return resolution * dims.cast<double>().norm(); }
  bool operator==(const GridGeometry& o) const {
    return origin == o.origin && resolution == o.resolution && dims == o.dims;
  }
};

/// Grid aligned to multiples of `resolution`, padded by two voxels around the
/// scene (boxes over their whole motion, points and workspace).
GridGeometry grid_for(const Scene& scene, double resolution);

struct OccupancyGrid {
  GridGeometry geometry;
  std::vector<std::uint8_t> occupied;

  std::size_t count() const;
};

/// A voxel is occupied when its center lies inside a box (at time t) or within
/// half a voxel of a point.
OccupancyGrid build_occupancy(const Scene& scene, const GridGeometry& geometry, double t = 0.0);
OccupancyGrid build_occupancy(const Scene& scene, double resolution);

struct OccupancyChange {
  std::vector<std::size_t> occupied;  // newly occupied voxel indices
  std::vector<std::size_t> freed;     // newly free voxel indices
  bool empty() const { return occupied.empty() && freed.empty(); }
};

OccupancyChange occupancy_diff(const OccupancyGrid& before, const OccupancyGrid& after);

struct EsdfSample {
  double distance;
  Vec3 gradient;
};

namespace detail {
/// Exact squared Euclidean distances (voxel units) to the nearest site, with
/// the site each voxel resolves to.
struct SiteField {
  static constexpr std::int32_t kNone = -1;
  std::vector<std::int64_t> sq;
  std::vector<std::int32_t> site;
};
}  // namespace detail

class EsdfGrid {
 public:
  const GridGeometry& geometry() const { return occupancy_.geometry; }
  const OccupancyGrid& occupancy() const { return occupancy_; }
  const std::vector<double>& distances() const { return distance_; }
  double distance(std::size_t index) const { return distance_[index]; }
  double distance(int i, int j, int k) const { return distance_[geometry().index(i, j, k)]; }
  /// Central differences of the distance lattice (one-sided at the border).
  const Vec3& voxel_gradient(std::size_t index) const { return gradient_[index]; }

  /// Trilinear interpolation of the voxel distances; the gradient is the exact
  /// derivative of that interpolant. Throws OutsideField when p has no full
  /// cell of voxel centers around it.
  EsdfSample query(const Vec3& p) const;
  bool interpolable(const Vec3& p) const;

  /// Replaces the distance lattice with arbitrary values (synthetic fields).
  static EsdfGrid from_distances(const GridGeometry& geometry, std::vector<double> distances);

  friend EsdfGrid compute_esdf(const OccupancyGrid& occupancy);
  friend EsdfGrid update_esdf(const EsdfGrid& esdf, const OccupancyChange& change);

 private:
  void refresh_distance(std::size_t index);
  void refresh_gradient(std::size_t index);

  OccupancyGrid occupancy_;
  detail::SiteField to_occupied_;
  detail::SiteField to_free_;
  std::vector<double> distance_;
  std::vector<Vec3> gradient_;
  bool has_sites_ = false;
};

EsdfGrid compute_esdf(const OccupancyGrid& occupancy);

/// Returns a new snapshot equal to compute_esdf on the changed occupancy.
/// Insertions propagate a wavefront from each new site; removals re-resolve the
/// voxels that pointed at a removed site.
EsdfGrid update_esdf(const EsdfGrid& esdf, const OccupancyChange& change);

/// Writes `path` (float32, little-endian, x fastest) and `path` + ".json"
/// holding {origin, resolution, dims}.
void export_grid(const EsdfGrid& esdf, const std::filesystem::path& path);
/// Reads a grid written by export_grid. The occupancy is recovered from the
/// sign of the lattice and the field is rebuilt and checked against the file.
EsdfGrid import_grid(const std::filesystem::path& path);
std::vector<float> read_grid_lattice(const std::filesystem::path& path);

}  // namespace wbmpc
