#include "reloc/config.hpp"

#include "reloc/error.hpp"
#include "reloc/scansim.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace reloc {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_range(const json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::ParseError, std::string(key) + " must be [min, max]");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
}

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  return root.contains(name) ? root.at(name) : empty;
}

}  // namespace

AppConfig reference_config() {
  AppConfig cfg;
  cfg.sampler.r_safe = 1.0;
  cfg.sampler.n_hit = 20;
  cfg.obs_fov = std::make_pair(12, 5);
  cfg.sampler.obs_dirs = fov_directions(cfg.pipeline.sensor, 12, 5);
  cfg.pipeline.map_voxel = 0.1;
  cfg.pipeline.icp.max_iterations = 200;
  cfg.pipeline.tau = 0.1;
  cfg.pipeline.prefilter = 500;
  return cfg;
}

AppConfig config_from_json(const std::string& text) {
  AppConfig cfg;
  try {
    const json root = json::parse(text);
    auto& pc = cfg.pipeline;

    const json& g = section(root, "grid");
    read(g, "resolution", pc.grid_resolution);
    read(g, "padding", cfg.grid_padding);

    const json& s = section(root, "sampler");
    auto& sc = cfg.sampler;
    read(s, "r_uav", sc.r_uav);
    read(s, "r_safe", sc.r_safe);
    read(s, "r_sep", sc.r_sep);
    if (s.contains("obs_dirs")) {
      const auto& d = s.at("obs_dirs");
      if (d.is_number_integer()) {
        sc.obs_dirs = fibonacci_directions(d.get<int>());
      } else if (d.is_object()) {
        const auto& f = d.at("fov");
        cfg.obs_fov = std::make_pair(f.at(0).get<int>(), f.at(1).get<int>());
      } else {
        for (const auto& v : d) sc.obs_dirs.push_back(Vec3(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()).normalized());
      }
    }
    read(s, "obs_range", sc.obs_range);
    read(s, "n_hit", sc.n_hit);
    read(s, "step", sc.step);
    read(s, "window", sc.window);
    read(s, "t_s", sc.t_s);
    read(s, "t_e", sc.t_e);
    read(s, "alpha", sc.alpha);
    read(s, "max_iters", sc.max_iters);
    read(s, "seed", sc.seed);

    const json& sn = section(root, "sensor");
    read_range(sn, "az_fov", pc.sensor.az_min, pc.sensor.az_max);
    read(sn, "az_step", pc.sensor.az_step);
    read_range(sn, "el_fov", pc.sensor.el_min, pc.sensor.el_max);
    read(sn, "el_step", pc.sensor.el_step);
    read(sn, "range", pc.sensor.range);

    const json& d = section(root, "sc");
    read(d, "n_rings", pc.sc.n_rings);
    read(d, "n_sectors", pc.sc.n_sectors);
    read(d, "l_max", pc.sc.l_max);
    read(d, "z_offset", pc.sc.z_offset);

    const json& i = section(root, "icp");
    read(i, "max_iterations", pc.icp.max_iterations);
    read(i, "max_corr_dist", pc.icp.max_corr_dist);
    read(i, "translation_eps", pc.icp.translation_eps);
    read(i, "rmse_eps", pc.icp.rmse_eps);
    read(i, "min_correspondences", pc.icp.min_correspondences);

    const json& dn = section(root, "down");
    read(dn, "query_voxel", pc.query_voxel);
    read(dn, "map_voxel", pc.map_voxel);

    const json& p = section(root, "pipeline");
    read(p, "k_f", pc.k_f);
    read(p, "k_c", pc.k_c);
    read(p, "tau", pc.tau);
    read(p, "prefilter", pc.prefilter);
    read(p, "default_roll", pc.default_roll);
    read(p, "default_pitch", pc.default_pitch);

    // The FoV lattice depends on the sensor section, so it is resolved last.
    if (cfg.obs_fov) sc.obs_dirs = fov_directions(pc.sensor, cfg.obs_fov->first, cfg.obs_fov->second);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  cfg.sampler.validate();
  cfg.pipeline.validate();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const AppConfig& cfg) {
  const auto& pc = cfg.pipeline;
  const auto& s = cfg.sampler;
  json obs_dirs;
  if (cfg.obs_fov) {
    obs_dirs = {{"fov", {cfg.obs_fov->first, cfg.obs_fov->second}}};
  } else if (s.obs_dirs.empty()) {
    obs_dirs = 32;
  } else if (s.obs_dirs == fibonacci_directions(static_cast<int>(s.obs_dirs.size()))) {
    obs_dirs = s.obs_dirs.size();
  } else {
    obs_dirs = json::array();
    for (const auto& d : s.obs_dirs) obs_dirs.push_back({d.x(), d.y(), d.z()});
  }

  json root;
  root["grid"] = {{"resolution", pc.grid_resolution}, {"padding", cfg.grid_padding}};
  root["sampler"] = {{"r_uav", s.r_uav},     {"r_safe", s.r_safe}, {"r_sep", s.r_sep},
                     {"obs_dirs", obs_dirs},
                     {"obs_range", s.obs_range}, {"n_hit", s.n_hit},   {"step", s.steer_length()},
                     {"window", s.window},   {"t_s", s.t_s},       {"t_e", s.t_e},
                     {"alpha", s.alpha},     {"max_iters", s.iteration_cap()}, {"seed", s.seed}};
  root["sensor"] = {{"az_fov", {pc.sensor.az_min, pc.sensor.az_max}},
                    {"az_step", pc.sensor.az_step},
                    {"el_fov", {pc.sensor.el_min, pc.sensor.el_max}},
                    {"el_step", pc.sensor.el_step},
                    {"range", pc.sensor.range}};
  root["sc"] = {{"n_rings", pc.sc.n_rings}, {"n_sectors", pc.sc.n_sectors}, {"l_max", pc.sc.l_max},
                {"z_offset", pc.sc.z_offset}};
  root["icp"] = {{"max_iterations", pc.icp.max_iterations},   {"max_corr_dist", pc.icp.max_corr_dist},
                 {"translation_eps", pc.icp.translation_eps}, {"rmse_eps", pc.icp.rmse_eps},
                 {"min_correspondences", pc.icp.min_correspondences}};
  root["down"] = {{"query_voxel", pc.query_voxel}, {"map_voxel", pc.map_voxel}};
  root["pipeline"] = {{"k_f", pc.k_f},           {"k_c", pc.k_c},
                      {"tau", pc.tau},           {"prefilter", pc.prefilter_size()},
                      {"default_roll", pc.default_roll}, {"default_pitch", pc.default_pitch}};
  return root.dump(2);
}

}  // namespace reloc
