#pragma once

#include "reloc/grid.hpp"
#include "reloc/types.hpp"

#include <vector>

namespace reloc {

/// Virtual LiDAR: an azimuth x elevation beam lattice (degrees), a maximum range
/// and the fixed mounting rotation R0 used for database scans.
struct SensorModel {
  double az_min = 0.0;
  double az_max = 360.0;
  double az_step = 1.0;
  double el_min = -7.0;
  double el_max = 52.0;
  double el_step = 2.0;
  double range = 50.0;
  Mat3 rotation = Mat3::Identity();

  void validate() const;
  friend bool operator==(const SensorModel&, const SensorModel&) = default;
};

/// Sensor-frame unit vectors, elevation-major then azimuth. Azimuth is half-open
/// at az_max when the span is a full turn; elevation is inclusive.
std::vector<Vec3> beam_directions(const SensorModel& model);

/// Coarse n_az x n_el lattice spread over the sensor field of view, rotated by R0.
/// Meant as an observability direction set that only looks where the sensor looks.
std::vector<Vec3> fov_directions(const SensorModel& model, int n_az, int n_el);

/// First-return scan from p with the model's fixed rotation. Map frame, lattice order.
PointCloud synthesize_scan(const OccupancyGrid& grid, const Point3& p, const SensorModel& model);

/// Same, with an explicit sensor orientation in place of model.rotation.
PointCloud synthesize_scan(const OccupancyGrid& grid, const Point3& p, const Mat3& orientation,
                           const SensorModel& model);

/// x_L = R0^T (x - p), order preserved.
PointCloud to_sensor_frame(const PointCloud& cloud, const Point3& p, const Mat3& r0);

/// x = R0 x_L + p, order preserved.
PointCloud to_map_frame(const PointCloud& cloud, const Point3& p, const Mat3& r0);

}  // namespace reloc
