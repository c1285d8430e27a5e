#pragma once

#include "reloc/pipeline.hpp"
#include "reloc/sampler.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

namespace reloc {

/// Everything the offline and online stages read from a config file.
///
/// JSON layout (all keys optional; config_to_json(AppConfig{}) lists the defaults):
///   grid.{resolution, padding}
///   sampler.{r_uav, r_safe, r_sep, obs_dirs, obs_range, n_hit, step, window, t_s, t_e, alpha, max_iters, seed}
///     obs_dirs: integer (Fibonacci count), list of [x, y, z], or {"fov": [n_az, n_el]} for a
///     coarse lattice over the sensor field of view
///   sensor.{az_fov, az_step, el_fov, el_step, range}
///   sc.{n_rings, n_sectors, l_max, z_offset}
///   icp.{max_iterations, max_corr_dist, translation_eps, rmse_eps, min_correspondences}
///   down.{query_voxel, map_voxel}
///   pipeline.{k_f, k_c, tau, prefilter, default_roll, default_pitch}
struct AppConfig {
  double grid_padding = 1.0;
  SamplerConfig sampler;
  PipelineConfig pipeline;  // pipeline.grid_resolution doubles as grid.resolution
  std::optional<std::pair<int, int>> obs_fov;  // set when obs_dirs came from {"fov": [...]}
};

/// Settings used for the shipped reference worlds (configs/reference.json). Differences
/// from the defaults: observability over a 12 x 5 lattice inside the sensor field of view
/// with n_hit = 20, r_safe = 1.0, a 0.1 m map voxel for a dense registration target,
/// 200 ICP iterations, tau = 0.1 and a 500-entry ring-key prefilter.
AppConfig reference_config();

AppConfig config_from_json(const std::string& text);
AppConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const AppConfig& cfg);

}  // namespace reloc
