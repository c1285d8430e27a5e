#include "reloc/registration.hpp"

#include "reloc/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace reloc {

void IcpConfig::validate() const {
  if (max_iterations < 1 || !(max_corr_dist > 0.0) || !(translation_eps > 0.0) || !(rmse_eps > 0.0) ||
      min_correspondences < 1)
    throw Error(ErrorCode::InvalidArgument, "ICP parameters must be positive");
}

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

RigidTransform se3_exp(const Vec6& xi) {
  const Vec3 rho = xi.head<3>();
  const Vec3 phi = xi.tail<3>();
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 w = skew(phi);
  const Mat3 w2 = w * w;

  double a, b, c;  // sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3
  if (theta < 1e-5) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  RigidTransform out;
  out.rotation = Mat3::Identity() + a * w + b * w2;
  out.translation = (Mat3::Identity() + b * w + c * w2) * rho;
  return out;
}

Mat36 point_jacobian(const Point3& q) {
  Mat36 j;
  j.leftCols<3>() = Mat3::Identity();
  j.rightCols<3>() = -skew(q);
  return j;
}

RigidTransform gauss_newton_step(std::span<const Point3> source, std::span<const Point3> target,
                                 const RigidTransform& pose, Vec6* delta_out) {
  if (source.size() != target.size()) throw Error(ErrorCode::InvalidArgument, "pair count mismatch");
  Mat6 h = Mat6::Zero();
  Vec6 g = Vec6::Zero();
  for (std::size_t k = 0; k < source.size(); ++k) {
    const Point3 q = pose.apply(source[k]);
    const Vec3 e = q - target[k];
    const Mat36 j = point_jacobian(q);
    h.noalias() += j.transpose() * j;
    g.noalias() += j.transpose() * e;
  }
  const Vec6 delta = -h.ldlt().solve(g);
  if (delta_out) *delta_out = delta;
  if (!delta.allFinite()) return pose;
  return se3_exp(delta) * pose;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw Error(ErrorCode::InvalidArgument, "voxel size must be positive");
  using Key = std::array<long long, 3>;
  std::vector<std::pair<Key, int>> keyed;
  keyed.reserve(cloud.size());
  for (int i = 0; i < static_cast<int>(cloud.size()); ++i) {
    const Point3& p = cloud.points[i];
    keyed.push_back({Key{static_cast<long long>(std::floor(p.x() / voxel)),
                         static_cast<long long>(std::floor(p.y() / voxel)),
                         static_cast<long long>(std::floor(p.z() / voxel))},
                     i});
  }
  std::sort(keyed.begin(), keyed.end());

  PointCloud out;
  out.frame = cloud.frame;
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    Vec3 sum = Vec3::Zero();
    while (j < keyed.size() && keyed[j].first == keyed[i].first) sum += cloud.points[keyed[j++].second];
    out.points.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return out;
}

RegistrationResult gn_icp(const PointCloud& source, const PointCloud& target, const RigidTransform& t0,
                          const IcpConfig& cfg) {
  if (target.empty()) throw Error(ErrorCode::EmptyInput, "target cloud");
  const KdTree tree(target.points);
  return gn_icp(source, tree, t0, cfg);
}

RegistrationResult gn_icp(const PointCloud& source, const KdTree& target, const RigidTransform& t0,
                          const IcpConfig& cfg) {
  cfg.validate();
  if (source.empty() || target.empty()) throw Error(ErrorCode::EmptyInput, "ICP clouds");
  if (!t0.is_valid(1e-6)) throw Error(ErrorCode::InvalidArgument, "initial pose is not rigid");

  const double gate2 = cfg.max_corr_dist * cfg.max_corr_dist;
  RegistrationResult result;
  result.pose = t0;

  std::vector<Point3> src, tgt;
  src.reserve(source.size());
  tgt.reserve(source.size());
  double prev_rmse = kRmseSentinel;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    src.clear();
    tgt.clear();
    double sum2 = 0.0;
    for (const auto& s : source.points) {
      const auto nn = target.nearest(result.pose.apply(s), gate2);
      if (nn.index < 0) continue;
      src.push_back(s);
      tgt.push_back(target.points()[nn.index]);
      sum2 += nn.dist2;
    }
    result.iterations = iter;
    result.correspondence_count = static_cast<int>(src.size());
    if (result.correspondence_count < cfg.min_correspondences) {
      result.converged = false;
      result.rmse = kRmseSentinel;
      return result;
    }
    const double rmse = std::sqrt(sum2 / static_cast<double>(src.size()));

    Vec6 delta;
    result.pose = gauss_newton_step(src, tgt, result.pose, &delta);
    if (iter % 10 == 0) result.pose.rotation = orthonormalize(result.pose.rotation);

    if (!delta.allFinite()) break;
    if (delta.norm() < cfg.translation_eps || std::abs(rmse - prev_rmse) < cfg.rmse_eps) {
      result.converged = true;
      break;
    }
    prev_rmse = rmse;
  }

  result.pose.rotation = orthonormalize(result.pose.rotation);
  int inliers = 0;
  result.rmse = fitness_rmse(source, target, result.pose, cfg.max_corr_dist, &inliers);
  result.correspondence_count = inliers;
  return result;
}

double fitness_rmse(const PointCloud& source, const PointCloud& target, const RigidTransform& t,
                    double max_corr_dist) {
  if (source.empty() || target.empty()) throw Error(ErrorCode::EmptyInput, "fitness clouds");
  const KdTree tree(target.points);
  return fitness_rmse(source, tree, t, max_corr_dist);
}

double fitness_rmse(const PointCloud& source, const KdTree& target, const RigidTransform& t,
                    double max_corr_dist, int* inliers) {
  const double gate2 = max_corr_dist * max_corr_dist;
  double sum2 = 0.0;
  int n = 0;
  for (const auto& s : source.points) {
    const auto nn = target.nearest(t.apply(s), gate2);
    if (nn.index < 0) continue;
    sum2 += nn.dist2;
    ++n;
  }
  if (inliers) *inliers = n;
  return n == 0 ? kRmseSentinel : std::sqrt(sum2 / n);
}

}  // namespace reloc
