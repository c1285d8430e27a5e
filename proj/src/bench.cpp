#include "reloc/bench.hpp"

#include "reloc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace reloc {

using nlohmann::json;

namespace {

constexpr double kSpecSlack = 1e-9;

bool inside_box(const Point3& p, const Point3& lo, const Point3& hi) {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

bool Primitive::contains(const Point3& p) const {
  if (!inside_box(p, min, max)) return false;
  if (kind != Kind::Ramp) return true;
  const double span = max[axis] - min[axis];
  const double frac = span > 0.0 ? (p[axis] - min[axis]) / span : 1.0;
  return p.z() <= min.z() + frac * (max.z() - min.z());
}

std::vector<Primitive> expand_primitives(const WorldSpec& spec) {
  std::vector<Primitive> out = spec.primitives;
  const ClutterSpec& c = spec.clutter;
  if (c.count <= 0) return out;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < c.count; ++i) {
    Vec3 size;
    for (int a = 0; a < 3; ++a) size[a] = c.min_size[a] + unit(rng) * (c.max_size[a] - c.min_size[a]);
    Primitive box;
    box.kind = Primitive::Kind::Box;
    for (int a = 0; a < 2; ++a) {
      const double lo = c.margin;
      const double hi = std::max(lo, spec.extent[a] - c.margin - size[a]);
      box.min[a] = lo + unit(rng) * (hi - lo);
      box.max[a] = std::min(box.min[a] + size[a], spec.extent[a]);
    }
    box.min.z() = c.base_z;
    box.max.z() = std::min(c.base_z + size.z(), spec.extent.z());
    out.push_back(box);
  }
  return out;
}

OccupancyGrid generate_world(const WorldSpec& spec, double resolution) {
  if (!(spec.extent.array() > 0.0).all() || !spec.extent.allFinite())
    throw Error(ErrorCode::SpecError, "extent must be positive");
  const auto prims = expand_primitives(spec);
  for (const auto& p : prims) {
    const bool ok = p.min.allFinite() && p.max.allFinite() && (p.min.array() <= p.max.array()).all() &&
                    (p.min.array() >= -kSpecSlack).all() &&
                    (p.max.array() <= spec.extent.array() + kSpecSlack).all() && (p.axis == 0 || p.axis == 1);
    if (!ok) throw Error(ErrorCode::SpecError, "primitive outside extent");
  }

  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a)
    dims[a] = std::max(1, static_cast<int>(std::ceil(spec.extent[a] / resolution - kSpecSlack)));
  OccupancyGrid grid(Point3::Zero(), resolution, dims);

  for (const auto& prim : prims) {
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor(prim.min[a] / resolution - 0.5)));
      hi[a] = std::min(dims[a] - 1, static_cast<int>(std::ceil(prim.max[a] / resolution - 0.5)));
    }
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) {
          const VoxelIndex v{x, y, z};
          if (prim.contains(grid.center(v))) grid.set_occupied(v);
        }
  }
  return grid;
}

WorldSpec corridor_world() {
  using K = Primitive::Kind;
  WorldSpec w;
  w.name = "corridor";
  w.extent = Vec3(60.0, 20.0, 8.0);
  w.seed = 11;
  w.primitives = {
      {K::Box, Point3(0, 0, 0), Point3(60, 20, 0.2)},  // ground
      // south facade: buildings of differing height
      {K::Wall, Point3(0, 0, 0), Point3(14, 0.4, 8)},
      {K::Wall, Point3(14, 0, 0), Point3(27, 0.4, 5.5)},
      {K::Wall, Point3(27, 0, 0), Point3(41, 0.4, 7)},
      {K::Wall, Point3(41, 0, 0), Point3(60, 0.4, 4.5)},
      // north facade
      {K::Wall, Point3(0, 19.6, 0), Point3(19, 20, 5)},
      {K::Wall, Point3(19, 19.6, 0), Point3(33, 20, 8)},
      {K::Wall, Point3(33, 19.6, 0), Point3(50, 20, 6)},
      {K::Wall, Point3(50, 19.6, 0), Point3(60, 20, 7.5)},
      // end buildings; the west end keeps a passage
      {K::Wall, Point3(59.6, 0.4, 0), Point3(60, 19.6, 6.5)},
      {K::Wall, Point3(0, 0.4, 0), Point3(0.4, 8, 5)},
      {K::Wall, Point3(0, 13, 0), Point3(0.4, 19.6, 7)},
      // inner wall, stepped
      {K::Wall, Point3(8, 9.8, 0), Point3(20, 10.2, 5)},
      {K::Wall, Point3(20, 9.8, 0), Point3(32, 10.2, 3)},
      {K::Wall, Point3(32, 9.8, 0), Point3(44, 10.2, 6)},
      {K::Box, Point3(48, 3, 0), Point3(54, 8, 7)},
      {K::Box, Point3(2, 12, 0), Point3(6, 16, 4)},
      {K::Box, Point3(26, 0.4, 6.4), Point3(29, 19.6, 7.2)},  // skybridges
      {K::Box, Point3(47, 0.4, 4.0), Point3(49, 9.8, 4.6)},
      {K::Box, Point3(10, 10.2, 5.5), Point3(12, 19.6, 6.1)},
      {K::Box, Point3(5, 0.4, 0), Point3(6, 1.4, 8)},         // facade pillars
      {K::Box, Point3(36, 0.4, 0), Point3(37.5, 1.2, 7)},
      {K::Box, Point3(12, 18.6, 0), Point3(13, 19.6, 5)},
      {K::Box, Point3(36, 18.8, 0), Point3(37, 19.6, 6)},
      {K::Box, Point3(1, 0.4, 2.6), Point3(4, 2.0, 3.0)},      // balconies and awnings
      {K::Box, Point3(8, 0.4, 5.0), Point3(12, 1.8, 5.4)},
      {K::Box, Point3(17, 0.4, 3.0), Point3(21, 1.6, 3.4)},
      {K::Box, Point3(23, 0.4, 1.8), Point3(26, 2.4, 2.1)},
      {K::Box, Point3(31, 0.4, 4.2), Point3(35, 1.8, 4.6)},
      {K::Box, Point3(44, 0.4, 3.0), Point3(47, 1.8, 3.4)},
      {K::Box, Point3(53, 0.4, 2.2), Point3(57, 2.2, 2.5)},
      {K::Box, Point3(2, 18.0, 3.5), Point3(6, 19.6, 3.9)},
      {K::Box, Point3(15, 18.2, 2.4), Point3(18, 19.6, 2.8)},
      {K::Box, Point3(22, 18.4, 4.5), Point3(25, 19.6, 4.9)},
      {K::Box, Point3(29, 17.8, 2.0), Point3(32, 19.6, 2.3)},
      {K::Box, Point3(40, 18.4, 3.6), Point3(44, 19.6, 4.0)},
      {K::Box, Point3(51, 18.2, 2.5), Point3(55, 19.6, 2.9)},
      {K::Box, Point3(56, 18.6, 5.0), Point3(59, 19.6, 5.4)},
      {K::Box, Point3(14, 10.2, 2.6), Point3(18, 11.4, 3.0)},  // ledges on the inner wall
      {K::Box, Point3(36, 8.6, 3.2), Point3(40, 9.8, 3.6)},
  };
  w.clutter = ClutterSpec{24, Vec3(0.6, 0.6, 0.5), Vec3(2.5, 2.5, 6.0), 0.2, 1.0};
  return w;
}

WorldSpec slope_world() {
  using K = Primitive::Kind;
  WorldSpec w;
  w.name = "slope";
  w.extent = Vec3(60.0, 40.0, 12.0);
  w.seed = 23;
  w.primitives = {
      {K::Box, Point3(0, 0, 0), Point3(60, 40, 0.2)},
      {K::Ramp, Point3(15, 0, 0.2), Point3(45, 40, 5), 0},
      {K::Box, Point3(45, 5, 0), Point3(60, 35, 5)},          // plateau
      {K::Wall, Point3(0, 0, 0), Point3(15, 0.4, 4)},
      {K::Box, Point3(3, 30, 0), Point3(9, 36, 8)},
      // buildings along the edges
      {K::Wall, Point3(0, 39.4, 0), Point3(28, 40, 10)},
      {K::Wall, Point3(28, 39.4, 0), Point3(60, 40, 12)},
      {K::Wall, Point3(20, 0, 0), Point3(50, 0.6, 9)},
      {K::Wall, Point3(0, 5, 0), Point3(0.4, 28, 7)},
      {K::Wall, Point3(59.6, 0, 0), Point3(60, 40, 11)},
      // trees: trunk plus canopy
      {K::Box, Point3(10.2, 18.2, 0), Point3(10.8, 18.8, 5)},
      {K::Box, Point3(8.5, 16.5, 5), Point3(12.5, 20.5, 6.5)},
      {K::Box, Point3(20.2, 9.2, 0), Point3(20.8, 9.8, 6)},
      {K::Box, Point3(18.5, 7.5, 6), Point3(22.5, 11.5, 7.5)},
      {K::Box, Point3(25.2, 29.2, 0), Point3(25.8, 29.8, 7.5)},
      {K::Box, Point3(23.5, 27.5, 7.5), Point3(27.5, 31.5, 9)},
      {K::Box, Point3(35.2, 17.2, 0), Point3(35.8, 17.8, 8)},
      {K::Box, Point3(33.5, 15.5, 8), Point3(37.5, 19.5, 9.5)},
      {K::Box, Point3(40.2, 7.2, 0), Point3(40.8, 7.8, 8.5)},
      {K::Box, Point3(38.5, 5.5, 8.5), Point3(42.5, 9.5, 10)},
      {K::Box, Point3(52.2, 20.2, 0), Point3(52.8, 20.8, 8.5)},
      {K::Box, Point3(50.5, 18.5, 8.5), Point3(54.5, 22.5, 10)},
      {K::Box, Point3(31.2, 35.2, 0), Point3(31.8, 35.8, 7)},
      {K::Box, Point3(29.5, 33.5, 7), Point3(33.5, 37.5, 8.5)},
      {K::Box, Point3(5.2, 12.2, 0), Point3(5.8, 12.8, 4)},
      {K::Box, Point3(3.5, 10.5, 4), Point3(7.5, 14.5, 5.5)},
      {K::Box, Point3(12.2, 4.2, 0), Point3(12.8, 4.8, 5)},
      {K::Box, Point3(10.5, 2.5, 5), Point3(14.5, 6.5, 6.5)},
      // eaves on the edge buildings
      {K::Box, Point3(0, 37.6, 6.5), Point3(28, 39.4, 7.0)},
      {K::Box, Point3(24, 0.6, 7.0), Point3(44, 2.2, 7.5)},
      {K::Box, Point3(57.8, 8, 8.0), Point3(59.6, 32, 8.5)},
  };
  w.clutter = ClutterSpec{30, Vec3(0.6, 0.6, 0.5), Vec3(3.0, 3.0, 6.0), 0.2, 1.0};
  return w;
}

std::vector<PointCloud> simulate_observation(const OccupancyGrid& grid, const RigidTransform& pose,
                                             const SensorModel& model, int k_f, double noise_sigma,
                                             std::uint64_t seed, ReturnModel returns) {
  if (k_f < 1) throw Error(ErrorCode::InvalidArgument, "k_f must be >= 1");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  if (!pose.is_valid(1e-6)) throw Error(ErrorCode::InvalidPose, "rotation is not rigid");
  const auto voxel = grid.try_voxel_of(pose.translation);
  if (!voxel || grid.occupied(*voxel)) throw Error(ErrorCode::InvalidPose);

  PointCloud map_scan;
  if (returns == ReturnModel::VoxelCenter) {
    map_scan = synthesize_scan(grid, pose.translation, pose.rotation, model);
  } else {
    for (const auto& d : beam_directions(model)) {
      const Vec3 dir = (pose.rotation * d).normalized();
      if (auto hit = raycast_first_return(grid, pose.translation, dir, model.range))
        map_scan.points.push_back(pose.translation + hit->range * dir);
    }
  }
  const PointCloud clean = to_sensor_frame(map_scan, pose.translation, pose.rotation);

  std::vector<PointCloud> frames(static_cast<std::size_t>(k_f), clean);
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (auto& f : frames)
      for (auto& p : f.points) p += Vec3(noise(rng), noise(rng), noise(rng));
  }
  return frames;
}

PointCloud surface_samples(const OccupancyGrid& grid, int per_edge) {
  if (per_edge < 1) throw Error(ErrorCode::InvalidArgument, "samples per edge must be >= 1");
  static constexpr int kNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const double r = grid.resolution();
  std::vector<double> offsets;
  for (int i = 0; i < per_edge; ++i) offsets.push_back(((i + 0.5) / per_edge - 0.5) * r);

  PointCloud out;
  out.frame = Frame::Map;
  grid.for_each_occupied([&](const VoxelIndex& v) {
    for (const auto& d : kNeighbors) {
      const VoxelIndex n{v.x + d[0], v.y + d[1], v.z + d[2]};
      if (!grid.in_range(n) || grid.occupied(n)) continue;
      const int normal_axis = d[0] != 0 ? 0 : (d[1] != 0 ? 1 : 2);
      const int a = (normal_axis + 1) % 3, b = (normal_axis + 2) % 3;
      const Point3 face = grid.center(v) + 0.5 * r * Vec3(d[0], d[1], d[2]);
      for (double s : offsets)
        for (double t : offsets) {
          Point3 p = face;
          p[a] += s;
          p[b] += t;
          out.points.push_back(p);
        }
    }
  });
  return out;
}

std::vector<RigidTransform> draw_feasible_poses(const OccupancyGrid& grid, const SamplerConfig& cfg, int count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Point3 lo = grid.origin(), hi = grid.max_corner();
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()), uz(lo.z(), hi.z());
  std::uniform_real_distribution<double> uyaw(-std::numbers::pi, std::numbers::pi);
  const auto dirs = cfg.observability_directions();

  std::vector<RigidTransform> poses;
  const long budget = 1000L * std::max(count, 1);
  for (long attempt = 0; attempt < budget && static_cast<int>(poses.size()) < count; ++attempt) {
    const Point3 p(ux(rng), uy(rng), uz(rng));
    const double yaw = wrap_angle(-uyaw(rng));  // maps [-pi, pi) onto (-pi, pi]
    if (grid.occupied(grid.voxel_of(p))) continue;
    if (!clearance_ok(grid, p, cfg.r_clr())) continue;
    if (observability_hits(grid, p, dirs, cfg.obs_range) < cfg.n_hit) continue;
    poses.push_back(RigidTransform::from_yaw(yaw, p));
  }
  if (static_cast<int>(poses.size()) < count) throw Error(ErrorCode::NoFeasibleRegion, "too few feasible poses");
  return poses;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

void score_trial(TrialRecord& rec) {
  if (rec.status != Status::Accepted) {
    rec.d_err = kRmseSentinel;
    rec.psi_err = kRmseSentinel;
    rec.success = false;
    return;
  }
  rec.d_err = (rec.estimate.translation - rec.ground_truth.translation).norm();
  rec.psi_err = std::abs(rad2deg(wrap_angle(rec.estimate.yaw() - rec.ground_truth.yaw())));
  rec.success = rec.d_err <= kSuccessMaxPositionError && rec.psi_err <= kSuccessMaxYawErrorDeg;
}

EvalSummary summarize(const std::vector<TrialRecord>& trials) {
  EvalSummary s;
  s.trials = static_cast<int>(trials.size());
  double sum_p = 0.0, sum_psi = 0.0, sum_t = 0.0;
  for (const auto& t : trials) {
    sum_t += t.elapsed;
    if (t.status == Status::Accepted) ++s.accepted;
    if (!t.success) continue;
    ++s.successes;
    sum_p += t.d_err;
    sum_psi += t.psi_err;
  }
  if (s.trials > 0) {
    s.sr = 100.0 * s.successes / s.trials;
    s.t_bar = sum_t / s.trials;
  }
  if (s.successes > 0) {
    s.e_p = sum_p / s.successes;
    s.e_psi = sum_psi / s.successes;
  }
  return s;
}

EvalReport evaluate(const DescriptorDatabase& db, const PointCloud& map_cloud, const OccupancyGrid& world,
                    const std::vector<RigidTransform>& poses, const PipelineConfig& cfg,
                    const EvalOptions& options) {
  if (options.trials_per_pose < 1) throw Error(ErrorCode::InvalidArgument, "trials per pose must be >= 1");
  const Relocalizer matcher(db, map_cloud, cfg);

  EvalReport report;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (int k = 0; k < options.trials_per_pose; ++k) {
      TrialRecord rec;
      rec.pose_index = static_cast<int>(i);
      rec.trial_index = k;
      rec.ground_truth = poses[i];
      try {
        const auto frames =
            simulate_observation(world, poses[i], cfg.sensor, cfg.k_f, options.noise_sigma,
                                 derive_seed(options.master_seed, i, static_cast<std::uint64_t>(k)), options.returns);
        const auto out = matcher.run(frames);
        rec.status = out.status;
        rec.estimate = out.pose;
        rec.candidate_rank_used = out.candidate_rank_used;
        rec.rmse = out.rmse;
        rec.elapsed = out.timings.total;
        rec.retrieve_time = out.timings.retrieve;
        if (out.status == Status::Failed) rec.failure_reason = "no candidate passed the RMSE gate";
      } catch (const Error& e) {
        rec.status = Status::Failed;
        rec.failure_reason = e.what();
      }
      score_trial(rec);
      report.trials.push_back(std::move(rec));
    }
  }
  report.summary = summarize(report.trials);
  return report;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json pose_json(const RigidTransform& t) {
  return json{{"x", t.translation.x()}, {"y", t.translation.y()}, {"z", t.translation.z()},
              {"yaw_deg", rad2deg(t.yaw())}};
}

json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

Point3 point_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected [x, y, z]");
  return Point3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

const char* kind_name(Primitive::Kind k) {
  switch (k) {
    case Primitive::Kind::Wall: return "wall";
    case Primitive::Kind::Box: return "box";
    case Primitive::Kind::Ramp: return "ramp";
  }
  return "box";
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  const auto& s = report.summary;
  json j;
  j["summary"] = {{"trials", s.trials}, {"accepted", s.accepted}, {"successes", s.successes},
                  {"SR", s.sr},         {"e_p", s.e_p},           {"e_psi", s.e_psi},
                  {"t_bar", s.t_bar}};
  j["trials"] = json::array();
  for (const auto& t : report.trials) {
    j["trials"].push_back({{"pose_index", t.pose_index},
                           {"trial_index", t.trial_index},
                           {"ground_truth", pose_json(t.ground_truth)},
                           {"status", to_string(t.status)},
                           {"estimate", t.status == Status::Accepted ? pose_json(t.estimate) : json(nullptr)},
                           {"rank", t.candidate_rank_used},
                           {"rmse", finite_or_null(t.rmse)},
                           {"d_err", finite_or_null(t.d_err)},
                           {"psi_err", finite_or_null(t.psi_err)},
                           {"elapsed", t.elapsed},
                           {"success", t.success},
                           {"failure_reason", t.failure_reason}});
  }
  return j.dump(2);
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << "pose_index,trial_index,gt_x,gt_y,gt_z,gt_yaw_deg,status,est_x,est_y,est_z,est_yaw_deg,"
        "err_x,err_y,err_z,err_yaw_deg,d_err,psi_err,rank,rmse,elapsed,success\n";
  os << std::setprecision(10);
  for (const auto& t : trials) {
    const auto& g = t.ground_truth;
    const auto& e = t.estimate;
    const bool ok = t.status == Status::Accepted;
    os << t.pose_index << ',' << t.trial_index << ',' << g.translation.x() << ',' << g.translation.y() << ','
       << g.translation.z() << ',' << rad2deg(g.yaw()) << ',' << to_string(t.status) << ',';
    if (ok) {
      const Vec3 d = e.translation - g.translation;
      os << e.translation.x() << ',' << e.translation.y() << ',' << e.translation.z() << ',' << rad2deg(e.yaw())
         << ',' << d.x() << ',' << d.y() << ',' << d.z() << ',' << rad2deg(wrap_angle(e.yaw() - g.yaw())) << ','
         << t.d_err << ',' << t.psi_err << ',';
    } else {
      os << ",,,,,,,,,,";
    }
    os << t.candidate_rank_used << ',' << (std::isfinite(t.rmse) ? std::to_string(t.rmse) : "") << ','
       << t.elapsed << ',' << (t.success ? 1 : 0) << '\n';
  }
}

void write_poses(std::ostream& os, const std::vector<RigidTransform>& poses) {
  os << "# x y z yaw\n" << std::setprecision(17);
  for (const auto& p : poses)
    os << p.translation.x() << ' ' << p.translation.y() << ' ' << p.translation.z() << ' ' << p.yaw() << '\n';
}

std::vector<RigidTransform> read_poses(std::istream& is) {
  std::vector<RigidTransform> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x, y, z, yaw;
    if (!(ls >> x >> y >> z >> yaw)) throw Error(ErrorCode::ParseError, "pose line " + std::to_string(line_no));
    poses.push_back(RigidTransform::from_yaw(yaw, Point3(x, y, z)));
  }
  return poses;
}

WorldSpec world_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    WorldSpec w;
    w.name = j.value("name", std::string{});
    w.extent = point_from(j.at("extent"));
    w.seed = j.value("seed", std::uint64_t{1});
    for (const auto& p : j.value("primitives", json::array())) {
      Primitive prim;
      const std::string kind = p.at("type").get<std::string>();
      if (kind == "wall")
        prim.kind = Primitive::Kind::Wall;
      else if (kind == "box")
        prim.kind = Primitive::Kind::Box;
      else if (kind == "ramp")
        prim.kind = Primitive::Kind::Ramp;
      else
        throw Error(ErrorCode::SpecError, "unknown primitive type '" + kind + "'");
      prim.min = point_from(p.at("min"));
      prim.max = point_from(p.at("max"));
      prim.axis = p.value("axis", 0);
      w.primitives.push_back(prim);
    }
    if (j.contains("clutter")) {
      const auto& c = j["clutter"];
      w.clutter.count = c.value("count", 0);
      if (c.contains("min_size")) w.clutter.min_size = point_from(c["min_size"]);
      if (c.contains("max_size")) w.clutter.max_size = point_from(c["max_size"]);
      w.clutter.base_z = c.value("base_z", 0.0);
      w.clutter.margin = c.value("margin", 1.0);
    }
    return w;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string world_to_json(const WorldSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["extent"] = point_json(spec.extent);
  j["seed"] = spec.seed;
  j["primitives"] = json::array();
  for (const auto& p : spec.primitives) {
    json pj = {{"type", kind_name(p.kind)}, {"min", point_json(p.min)}, {"max", point_json(p.max)}};
    if (p.kind == Primitive::Kind::Ramp) pj["axis"] = p.axis;
    j["primitives"].push_back(pj);
  }
  const auto& c = spec.clutter;
  j["clutter"] = {{"count", c.count},   {"min_size", point_json(c.min_size)}, {"max_size", point_json(c.max_size)},
                  {"base_z", c.base_z}, {"margin", c.margin}};
  return j.dump(2);
}

}  // namespace reloc
