#pragma once

#include "reloc/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace reloc {

/// Binary voxel map over the axis-aligned box [origin, origin + dims * resolution].
/// Cells are half-open [k*r, (k+1)*r) per axis; points on the max face of the
/// box are clamped into the last cell.
///
/// Mutation (set_occupied) is meant for construction only. Once built, the grid
/// is read-only and safe to share across threads.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Point3& origin, double resolution, const std::array<int, 3>& dims);

  const Point3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const std::array<int, 3>& dims() const { return dims_; }
  Point3 max_corner() const;
  std::size_t voxel_count() const;
  std::size_t occupied_count() const;

  bool contains(const Point3& p) const;
  bool in_range(const VoxelIndex& v) const {
    return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < dims_[0] && v.y < dims_[1] && v.z < dims_[2];
  }

  /// Throws OutOfBounds when p is outside the box.
  VoxelIndex voxel_of(const Point3& p) const;
  std::optional<VoxelIndex> try_voxel_of(const Point3& p) const;

  /// Voxels outside the grid read as free.
  bool occupied(const VoxelIndex& v) const {
    if (!in_range(v)) return false;
    const std::size_t i = linear(v);
    return (bits_[i >> 6] >> (i & 63)) & 1u;
  }
  void set_occupied(const VoxelIndex& v, bool value = true);

  Point3 center(const VoxelIndex& v) const;
  std::pair<Point3, Point3> cell_bounds(const VoxelIndex& v) const;

  template <typename Fn>
  void for_each_occupied(Fn&& fn) const {
    for (int z = 0; z < dims_[2]; ++z)
      for (int y = 0; y < dims_[1]; ++y)
        for (int x = 0; x < dims_[0]; ++x)
          if (occupied({x, y, z})) fn(VoxelIndex{x, y, z});
  }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  std::size_t linear(const VoxelIndex& v) const {
    return (static_cast<std::size_t>(v.z) * dims_[1] + v.y) * dims_[0] + v.x;
  }

  Point3 origin_ = Point3::Zero();
  double resolution_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<std::uint64_t> bits_;
};

/// Voxelizes a map-frame cloud. The box is the cloud's bounding box inflated by padding.
OccupancyGrid build_grid(const PointCloud& cloud, double resolution, double padding);

/// True iff every occupied voxel center lies at distance >= r_clr from p.
bool clearance_ok(const OccupancyGrid& grid, const Point3& p, double r_clr);

struct RayHit {
  Point3 point;  // occupied voxel center, map frame
  VoxelIndex voxel;
  double range = 0.0;  // ray parameter at which the voxel is entered
};

/// First occupied voxel along the ray within max_range, by incremental voxel
/// stepping. Equal crossing parameters step x, then y, then z.
std::optional<RayHit> raycast_first_return(const OccupancyGrid& grid, const Point3& origin,
                                           const Vec3& dir, double max_range);

/// Centers of all occupied voxels, in ascending linear index order.
PointCloud occupied_centers(const OccupancyGrid& grid);

/// Centers of occupied voxels with at least one free 6-neighbor (or on the grid border).
PointCloud surface_centers(const OccupancyGrid& grid);

}  // namespace reloc
