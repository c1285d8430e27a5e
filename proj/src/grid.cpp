#include "reloc/grid.hpp"

#include "reloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reloc {

namespace {
// Slack for points that sit on the max face after floating-point rounding.
constexpr double kBoundarySlack = 1e-9;
}  // namespace

OccupancyGrid::OccupancyGrid(const Point3& origin, double resolution, const std::array<int, 3>& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1");
  if (!is_finite(origin)) throw Error(ErrorCode::InvalidPoint, "grid origin");
  bits_.assign((voxel_count() + 63) / 64, 0);
}

Point3 OccupancyGrid::max_corner() const {
  return origin_ + resolution_ * Vec3(dims_[0], dims_[1], dims_[2]);
}

std::size_t OccupancyGrid::voxel_count() const {
  return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
}

std::size_t OccupancyGrid::occupied_count() const {
  std::size_t n = 0;
  for (auto w : bits_) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

bool OccupancyGrid::contains(const Point3& p) const {
  if (!is_finite(p)) return false;
  const double slack = kBoundarySlack * resolution_;
  for (int a = 0; a < 3; ++a) {
    const double lo = origin_[a];
    const double hi = origin_[a] + resolution_ * dims_[a];
    if (p[a] < lo - slack || p[a] > hi + slack) return false;
  }
  return true;
}

std::optional<VoxelIndex> OccupancyGrid::try_voxel_of(const Point3& p) const {
  if (!contains(p)) return std::nullopt;
  VoxelIndex v;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin_[a]) / resolution_);
    v[a] = std::clamp(static_cast<int>(f), 0, dims_[a] - 1);
  }
  return v;
}

VoxelIndex OccupancyGrid::voxel_of(const Point3& p) const {
  auto v = try_voxel_of(p);
  if (!v) throw Error(ErrorCode::OutOfBounds);
  return *v;
}

void OccupancyGrid::set_occupied(const VoxelIndex& v, bool value) {
  if (!in_range(v)) throw Error(ErrorCode::OutOfBounds, "voxel index");
  const std::size_t i = linear(v);
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value)
    bits_[i >> 6] |= mask;
  else
    bits_[i >> 6] &= ~mask;
}

Point3 OccupancyGrid::center(const VoxelIndex& v) const {
  return origin_ + resolution_ * Vec3(v.x + 0.5, v.y + 0.5, v.z + 0.5);
}

std::pair<Point3, Point3> OccupancyGrid::cell_bounds(const VoxelIndex& v) const {
  const Point3 lo = origin_ + resolution_ * Vec3(v.x, v.y, v.z);
  return {lo, lo + Vec3::Constant(resolution_)};
}

OccupancyGrid build_grid(const PointCloud& cloud, double resolution, double padding) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyInput);
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  if (!(padding >= 0.0)) throw Error(ErrorCode::InvalidArgument, "padding must be >= 0");

  Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 hi = -lo;
  for (const auto& p : cloud.points) {
    if (!is_finite(p)) throw Error(ErrorCode::InvalidPoint);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() -= padding;
  hi.array() += padding;

  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const double cells = std::ceil((hi[a] - lo[a]) / resolution - kBoundarySlack);
    dims[a] = std::max(1, static_cast<int>(cells));
  }

  OccupancyGrid grid(lo, resolution, dims);
  for (const auto& p : cloud.points) grid.set_occupied(grid.voxel_of(p));
  return grid;
}

bool clearance_ok(const OccupancyGrid& grid, const Point3& p, double r_clr) {
  if (!(r_clr >= 0.0)) throw Error(ErrorCode::InvalidArgument, "clearance radius must be >= 0");
  const VoxelIndex c = grid.voxel_of(p);
  if (r_clr == 0.0) return true;

  const double r = grid.resolution();
  const int reach = static_cast<int>(std::ceil(r_clr / r)) + 1;
  const double r2 = r_clr * r_clr;
  const auto& dims = grid.dims();

  const int z0 = std::max(0, c.z - reach), z1 = std::min(dims[2] - 1, c.z + reach);
  const int y0 = std::max(0, c.y - reach), y1 = std::min(dims[1] - 1, c.y + reach);
  const int x0 = std::max(0, c.x - reach), x1 = std::min(dims[0] - 1, c.x + reach);
  for (int z = z0; z <= z1; ++z) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const VoxelIndex v{x, y, z};
        if (!grid.occupied(v)) continue;
        if ((grid.center(v) - p).squaredNorm() < r2) return false;
      }
    }
  }
  return true;
}

std::optional<RayHit> raycast_first_return(const OccupancyGrid& grid, const Point3& origin,
                                           const Vec3& dir, double max_range) {
  if (!dir.allFinite() || std::abs(dir.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidDirection);
  if (!(max_range > 0.0)) throw Error(ErrorCode::InvalidArgument, "range must be positive");

  VoxelIndex v = grid.voxel_of(origin);
  if (grid.occupied(v)) throw Error(ErrorCode::InvalidArgument, "ray origin in occupied voxel");

  const double r = grid.resolution();
  const Point3& go = grid.origin();
  constexpr double inf = std::numeric_limits<double>::infinity();

  int step[3];
  for (int a = 0; a < 3; ++a) step[a] = dir[a] > 0.0 ? 1 : (dir[a] < 0.0 ? -1 : 0);

  // Parameter at which the ray crosses the next boundary on each axis. Recomputed
  // from the boundary position on every step so error does not accumulate.
  auto crossing = [&](int a) {
    if (step[a] == 0) return inf;
    const double boundary = go[a] + r * (step[a] > 0 ? v[a] + 1 : v[a]);
    return (boundary - origin[a]) / dir[a];
  };
  double t_next[3] = {crossing(0), crossing(1), crossing(2)};

  while (true) {
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    const double t = t_next[axis];
    if (t > max_range) return std::nullopt;

    v[axis] += step[axis];
    if (v[axis] < 0 || v[axis] >= grid.dims()[axis]) return std::nullopt;
    t_next[axis] = crossing(axis);

    if (grid.occupied(v)) return RayHit{grid.center(v), v, std::max(t, 0.0)};
  }
}

PointCloud occupied_centers(const OccupancyGrid& grid) {
  PointCloud out;
  out.frame = Frame::Map;
  out.points.reserve(grid.occupied_count());
  grid.for_each_occupied([&](const VoxelIndex& v) { out.points.push_back(grid.center(v)); });
  return out;
}

PointCloud surface_centers(const OccupancyGrid& grid) {
  PointCloud out;
  out.frame = Frame::Map;
  static constexpr int kNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                           {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  grid.for_each_occupied([&](const VoxelIndex& v) {
    for (const auto& d : kNeighbors) {
      const VoxelIndex n{v.x + d[0], v.y + d[1], v.z + d[2]};
      if (!grid.in_range(n) || !grid.occupied(n)) {
        out.points.push_back(grid.center(v));
        return;
      }
    }
  });
  return out;
}

}  // namespace reloc
