#include "reloc/bench.hpp"
#include "reloc/config.hpp"
#include "reloc/error.hpp"
#include "reloc/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace reloc;
using nlohmann::json;

namespace {

AppConfig config_or_default(const std::string& path) {
  return path.empty() ? AppConfig{} : load_config(path);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// "corridor" and "slope" name the built-in worlds; anything else is a JSON file.
WorldSpec resolve_world(const std::string& arg) {
  if (arg == "corridor") return corridor_world();
  if (arg == "slope") return slope_world();
  return world_from_json(slurp(arg));
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return os;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

json timings_json(const StageTimings& t) {
  return {{"accumulate", t.accumulate}, {"encode", t.encode}, {"retrieve", t.retrieve},
          {"downsample", t.downsample}, {"icp", t.icp},       {"total", t.total}};
}

struct BuildArgs {
  std::string world, config, out, samples, density, map_out;
  int threads = 0;
};

int run_build(const BuildArgs& a) {
  const AppConfig cfg = config_or_default(a.config);
  const WorldSpec spec = resolve_world(a.world);
  const auto t = std::chrono::steady_clock::now();
  const OccupancyGrid grid = generate_world(spec, cfg.pipeline.grid_resolution);
  const SamplingResult sr = sample_candidates(grid, cfg.sampler);
  std::fprintf(stderr, "sampled %zu positions in %ld iterations%s\n", sr.samples.size(), sr.iterations,
               sr.stopped_early ? " (early stop)" : "");
  const DescriptorDatabase db = build_database(grid, sr.samples, cfg.pipeline.sensor, cfg.pipeline.sc, a.threads);
  save_database(a.out, db);
  if (!a.samples.empty()) {
    auto os = open_out(a.samples);
    write_candidates(os, sr.samples);
  }
  if (!a.density.empty()) {
    auto os = open_out(a.density);
    write_density_csv(os, grid, sr.samples);
  }
  if (!a.map_out.empty()) save_cloud(a.map_out, surface_samples(grid));
  std::fprintf(stderr, "database: %zu entries, %.2f s\n", db.size(), seconds_since(t));
  return 0;
}

struct RelocArgs {
  std::string db, map, scans, config;
  bool json_out = false;
};

int run_relocalize(const RelocArgs& a) {
  const AppConfig cfg = load_config(a.config);
  const DescriptorDatabase db = load_database(a.db);
  const PointCloud map = load_cloud(a.map);
  const auto scans = load_scans(a.scans);
  const auto out = relocalize(db, map, scans, cfg.pipeline);

  const Eigen::Matrix4d m = out.pose.matrix();
  if (a.json_out) {
    json pose = json::array();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) pose.push_back(m(r, c));
    json rec = {{"status", to_string(out.status)},
                {"pose", pose},
                {"rank", out.candidate_rank_used},
                {"rmse", std::isfinite(out.rmse) ? json(out.rmse) : json(nullptr)},
                {"timings", timings_json(out.timings)}};
    std::cout << rec.dump(2) << '\n';
  } else {
    std::cout << std::setprecision(12);
    for (int r = 0; r < 4; ++r)
      std::cout << m(r, 0) << ' ' << m(r, 1) << ' ' << m(r, 2) << ' ' << m(r, 3) << '\n';
    std::cout << "status " << to_string(out.status) << '\n'
              << "rank " << out.candidate_rank_used << '\n'
              << "rmse " << out.rmse << '\n'
              << "time accumulate " << out.timings.accumulate << '\n'
              << "time encode " << out.timings.encode << '\n'
              << "time retrieve " << out.timings.retrieve << '\n'
              << "time downsample " << out.timings.downsample << '\n';
    for (std::size_t k = 0; k < out.timings.icp.size(); ++k)
      std::cout << "time icp " << k + 1 << ' ' << out.timings.icp[k] << '\n';
    std::cout << "time total " << out.timings.total << '\n';
  }
  return out.status == Status::Accepted ? 0 : 2;
}

struct SimArgs {
  std::string world, config, out;
  int poses = 0;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  bool surface_hits = false;
};

// Writes the world spec, its grid, a dense map cloud and, on request, feasible
// poses plus one noisy scan set per pose.
int run_simulate(const SimArgs& a) {
  const AppConfig cfg = config_or_default(a.config);
  const WorldSpec spec = resolve_world(a.world);
  const OccupancyGrid grid = generate_world(spec, cfg.pipeline.grid_resolution);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  open_out(dir / "world.json") << world_to_json(spec) << '\n';
  {
    auto os = open_out(dir / "grid.txt");
    write_grid_text(os, grid);
  }
  save_cloud(dir / "map.r3pc", surface_samples(grid));
  if (a.poses > 0) {
    const auto poses = draw_feasible_poses(grid, cfg.sampler, a.poses, a.seed);
    {
      auto os = open_out(dir / "poses.txt");
      write_poses(os, poses);
    }
    const ReturnModel returns = a.surface_hits ? ReturnModel::SurfaceHit : ReturnModel::VoxelCenter;
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const auto frames = simulate_observation(grid, poses[i], cfg.pipeline.sensor, cfg.pipeline.k_f, a.sigma,
                                               derive_seed(a.seed, i, 0), returns);
      char name[32];
      std::snprintf(name, sizeof name, "scans_%03zu", i);
      for (std::size_t f = 0; f < frames.size(); ++f) {
        char file[32];
        std::snprintf(file, sizeof file, "%03zu.r3pc", f);
        fs::create_directories(dir / name);
        save_cloud(dir / name / file, frames[f]);
      }
    }
  }
  std::fprintf(stderr, "%s: %zu occupied voxels written to %s\n", spec.name.c_str(), grid.occupied_count(),
               dir.string().c_str());
  return 0;
}

struct EvalArgs {
  std::string db, map, world, poses, config, out, csv;
  int trials = 20;
  double sigma = 0.0;
  std::uint64_t seed = 7;
  bool voxel_centers = false;
};

int run_eval(const EvalArgs& a) {
  const AppConfig cfg = config_or_default(a.config);
  const DescriptorDatabase db = load_database(a.db);
  const PointCloud map = load_cloud(a.map);
  const OccupancyGrid grid = generate_world(resolve_world(a.world), cfg.pipeline.grid_resolution);
  std::ifstream ps(a.poses);
  if (!ps) throw Error(ErrorCode::Io, "cannot read " + a.poses);
  const auto poses = read_poses(ps);

  EvalOptions opt;
  opt.trials_per_pose = a.trials;
  opt.noise_sigma = a.sigma;
  opt.master_seed = a.seed;
  opt.returns = a.voxel_centers ? ReturnModel::VoxelCenter : ReturnModel::SurfaceHit;
  const EvalReport rep = evaluate(db, map, grid, poses, cfg.pipeline, opt);

  open_out(a.out) << report_to_json(rep) << '\n';
  if (!a.csv.empty()) {
    auto os = open_out(a.csv);
    write_trials_csv(os, rep.trials);
  }
  const auto& s = rep.summary;
  std::printf("trials %d  accepted %d  SR %.1f%%  e_p %.3f m  e_psi %.3f deg  t_bar %.3f s\n", s.trials, s.accepted,
              s.sr, s.e_p, s.e_psi, s.t_bar);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prior-map LiDAR relocalization: offline database build and online matching"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-db", "Sample a world, ray cast and encode the descriptor database");
  b->add_option("--world", build.world, "corridor, slope or a world JSON file")->required();
  b->add_option("--config", build.config, "JSON config (defaults when omitted)");
  b->add_option("--out", build.out, "database file")->required();
  b->add_option("--samples", build.samples, "candidate export, 'x y z parent' per line");
  b->add_option("--density", build.density, "per-column sample counts as CSV");
  b->add_option("--map-out", build.map_out, "dense surface cloud of the world");
  b->add_option("--threads", build.threads, "worker threads (0 = hardware concurrency)");

  RelocArgs reloc_args;
  auto* r = app.add_subcommand("relocalize", "Estimate the pose of a scan set on the prior map");
  r->add_option("--db", reloc_args.db)->required();
  r->add_option("--map", reloc_args.map, "map cloud (text or .r3pc)")->required();
  r->add_option("--scans", reloc_args.scans, "scan directory or single scan file")->required();
  r->add_option("--config", reloc_args.config)->required();
  r->add_flag("--json", reloc_args.json_out, "machine-readable output");

  SimArgs sim;
  auto* s = app.add_subcommand("simulate", "Export a world with its map cloud and optional simulated scans");
  s->add_option("--world", sim.world, "corridor, slope or a world JSON file")->required();
  s->add_option("--out", sim.out, "output directory")->required();
  s->add_option("--config", sim.config);
  s->add_option("--poses", sim.poses, "number of feasible poses to draw and scan");
  s->add_option("--sigma", sim.sigma, "per-axis point noise, m");
  s->add_option("--seed", sim.seed);
  s->add_flag("--surface-hits", sim.surface_hits, "place returns on voxel faces instead of centers");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Closed-loop evaluation over ground-truth poses");
  e->add_option("--db", ev.db)->required();
  e->add_option("--map", ev.map)->required();
  e->add_option("--world", ev.world)->required();
  e->add_option("--poses", ev.poses, "'x y z yaw' per line")->required();
  e->add_option("--config", ev.config);
  e->add_option("--trials", ev.trials, "trials per pose");
  e->add_option("--sigma", ev.sigma, "per-axis point noise, m");
  e->add_option("--seed", ev.seed, "master seed");
  e->add_option("--out", ev.out, "report JSON")->required();
  e->add_option("--csv", ev.csv, "per-trial CSV");
  e->add_flag("--voxel-centers", ev.voxel_centers, "simulate returns at voxel centers");

  bool reference = false;
  auto* c = app.add_subcommand("config", "Print a config as JSON");
  c->add_flag("--reference", reference, "settings used for the shipped worlds");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*b) return run_build(build);
    if (*r) return run_relocalize(reloc_args);
    if (*s) return run_simulate(sim);
    if (*e) return run_eval(ev);
    if (*c) {
      std::cout << config_to_json(reference ? reference_config() : AppConfig{}) << '\n';
      return 0;
    }
  } catch (const Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
