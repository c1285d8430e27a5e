#pragma once

#include "reloc/kdtree.hpp"
#include "reloc/types.hpp"

#include <Eigen/Core>

#include <limits>
#include <span>

namespace reloc {

struct IcpConfig {
  int max_iterations = 50;
  double max_corr_dist = 2.0;
  double translation_eps = 1e-6;
  double rmse_eps = 1e-6;
  int min_correspondences = 20;

  void validate() const;
};

inline constexpr double kRmseSentinel = std::numeric_limits<double>::infinity();

struct RegistrationResult {
  RigidTransform pose;
  double rmse = kRmseSentinel;
  int iterations = 0;
  bool converged = false;
  int correspondence_count = 0;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

/// Exponential map of a twist (rho, phi): translation part first, rotation vector second.
RigidTransform se3_exp(const Vec6& xi);

/// Jacobian of exp(xi) * q with respect to xi at xi = 0, i.e. [I | -[q]x].
Mat36 point_jacobian(const Point3& q);

/// One Gauss-Newton update exp(delta) * pose for fixed pairs (source[k] -> target[k]).
RigidTransform gauss_newton_step(std::span<const Point3> source, std::span<const Point3> target,
                                 const RigidTransform& pose, Vec6* delta_out = nullptr);

/// Centroid per occupied voxel, in ascending (x, y, z) voxel-index order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

/// Point-to-point ICP; the pose maps source coordinates into the target frame.
RegistrationResult gn_icp(const PointCloud& source, const PointCloud& target, const RigidTransform& t0,
                          const IcpConfig& cfg);
RegistrationResult gn_icp(const PointCloud& source, const KdTree& target, const RigidTransform& t0,
                          const IcpConfig& cfg);

/// RMS nearest-neighbor distance over source points with a target neighbor within
/// max_corr_dist; kRmseSentinel when there is none.
double fitness_rmse(const PointCloud& source, const PointCloud& target, const RigidTransform& t,
                    double max_corr_dist);
double fitness_rmse(const PointCloud& source, const KdTree& target, const RigidTransform& t,
                    double max_corr_dist, int* inliers = nullptr);

}  // namespace reloc
