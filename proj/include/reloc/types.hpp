#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <vector>

namespace reloc {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Frame { Map, Sensor };

struct PointCloud {
  std::vector<Point3> points;
  Frame frame = Frame::Map;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Integer voxel coordinate.
struct VoxelIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  int& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

/// SE(3) pose. Maps a point from the body frame into the reference frame:
/// x_ref = rotation * x_body + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_yaw(double yaw, const Vec3& t);
  static RigidTransform from_rpy(double roll, double pitch, double yaw, const Vec3& t);

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;

  /// Row-major 4x4 homogeneous matrix.
  Eigen::Matrix4d matrix() const;

  /// Heading angle of the rotation's x axis in the xy plane.
  double yaw() const;

  /// R^T R = I and det R = 1 within tol.
  bool is_valid(double tol = 1e-9) const;
};

bool is_finite(const Point3& p);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

double deg2rad(double deg);
double rad2deg(double rad);

/// Projects a near-rotation onto SO(3).
Mat3 orthonormalize(const Mat3& r);

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& t, Frame frame);

}  // namespace reloc
