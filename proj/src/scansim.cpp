#include "reloc/scansim.hpp"

#include "reloc/error.hpp"

#include <cmath>

namespace reloc {

namespace {

constexpr double kLatticeSlack = 1e-9;

bool full_turn(const SensorModel& m) { return m.az_max - m.az_min >= 360.0 - kLatticeSlack; }

int azimuth_count(const SensorModel& m) {
  const double span = m.az_max - m.az_min;
  if (full_turn(m)) return static_cast<int>(std::ceil(span / m.az_step - kLatticeSlack));
  return static_cast<int>(std::floor(span / m.az_step + kLatticeSlack)) + 1;
}

int elevation_count(const SensorModel& m) {
  return static_cast<int>(std::floor((m.el_max - m.el_min) / m.el_step + kLatticeSlack)) + 1;
}

bool is_rotation(const Mat3& r) {
  return r.allFinite() && (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9 &&
         std::abs(r.determinant() - 1.0) <= 1e-9;
}

}  // namespace

void SensorModel::validate() const {
  const bool finite = std::isfinite(az_min) && std::isfinite(az_max) && std::isfinite(az_step) &&
                      std::isfinite(el_min) && std::isfinite(el_max) && std::isfinite(el_step);
  if (!finite || !(az_step > 0.0) || !(el_step > 0.0) || az_min > az_max || el_min > el_max ||
      el_min < -90.0 || el_max > 90.0)
    throw Error(ErrorCode::EmptyBeamSet);
  if (!(range > 0.0)) throw Error(ErrorCode::InvalidArgument, "sensor range must be positive");
  if (!is_rotation(rotation)) throw Error(ErrorCode::InvalidArgument, "sensor rotation is not in SO(3)");
}

std::vector<Vec3> beam_directions(const SensorModel& model) {
  model.validate();
  const int n_az = azimuth_count(model);
  const int n_el = elevation_count(model);
  if (n_az < 1 || n_el < 1) throw Error(ErrorCode::EmptyBeamSet);

  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n_az) * n_el);
  for (int e = 0; e < n_el; ++e) {
    const double el = deg2rad(model.el_min + e * model.el_step);
    const double ce = std::cos(el), se = std::sin(el);
    for (int a = 0; a < n_az; ++a) {
      const double az = deg2rad(model.az_min + a * model.az_step);
      dirs.emplace_back(Vec3(ce * std::cos(az), ce * std::sin(az), se).normalized());
    }
  }
  return dirs;
}

std::vector<Vec3> fov_directions(const SensorModel& model, int n_az, int n_el) {
  model.validate();
  if (n_az < 1 || n_el < 1) throw Error(ErrorCode::EmptyBeamSet, "direction counts must be >= 1");
  const double az_span = model.az_max - model.az_min;
  const bool full_circle = az_span >= 360.0 - 1e-9;
  const double el_span = model.el_max - model.el_min;

  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n_az) * n_el);
  for (int e = 0; e < n_el; ++e) {
    const double el = deg2rad(n_el == 1 ? model.el_min + 0.5 * el_span : model.el_min + e * el_span / (n_el - 1));
    for (int a = 0; a < n_az; ++a) {
      const double az = deg2rad(full_circle ? model.az_min + a * 360.0 / n_az
                                            : model.az_min + (a + 0.5) * az_span / n_az);
      const Vec3 d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      dirs.push_back((model.rotation * d).normalized());
    }
  }
  return dirs;
}

PointCloud synthesize_scan(const OccupancyGrid& grid, const Point3& p, const SensorModel& model) {
  return synthesize_scan(grid, p, model.rotation, model);
}

PointCloud synthesize_scan(const OccupancyGrid& grid, const Point3& p, const Mat3& orientation,
                           const SensorModel& model) {
  if (!is_rotation(orientation)) throw Error(ErrorCode::InvalidArgument, "orientation is not in SO(3)");
  PointCloud scan;
  scan.frame = Frame::Map;
  for (const auto& d : beam_directions(model)) {
    const Vec3 world_dir = (orientation * d).normalized();
    if (auto hit = raycast_first_return(grid, p, world_dir, model.range)) scan.points.push_back(hit->point);
  }
  return scan;
}

PointCloud to_sensor_frame(const PointCloud& cloud, const Point3& p, const Mat3& r0) {
  PointCloud out;
  out.frame = Frame::Sensor;
  out.points.reserve(cloud.size());
  const Mat3 rt = r0.transpose();
  for (const auto& x : cloud.points) out.points.push_back(rt * (x - p));
  return out;
}

PointCloud to_map_frame(const PointCloud& cloud, const Point3& p, const Mat3& r0) {
  PointCloud out;
  out.frame = Frame::Map;
  out.points.reserve(cloud.size());
  for (const auto& x : cloud.points) out.points.push_back(r0 * x + p);
  return out;
}

}  // namespace reloc
