#include "fixtures.hpp"
#include "reloc/bench.hpp"
#include "reloc/error.hpp"
#include "reloc/pipeline.hpp"

#include <doctest.h>

#include <random>

using namespace reloc;

namespace {

struct Scene {
  OccupancyGrid grid;
  SamplerConfig sampler;
  DescriptorDatabase db;
  PointCloud map;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene out;
    out.grid = generate_world(fixture::courtyard(), 0.2);
    out.sampler.window = 2000;
    out.sampler.seed = 5;
    // Only keep positions where the sensor itself sees enough structure.
    out.sampler.r_safe = 1.0;
    out.sampler.n_hit = 20;
    out.sampler.obs_dirs = fov_directions(SensorModel{}, 12, 5);
    const auto samples = sample_candidates(out.grid, out.sampler).samples;
    out.db = build_database(out.grid, samples, SensorModel{}, ScParams{}, 1);
    out.map = surface_samples(out.grid, 2);
    return out;
  }();
  return s;
}

PointCloud cloud_n(int n, double offset) {
  PointCloud c;
  c.frame = Frame::Sensor;
  for (int i = 0; i < n; ++i) c.points.emplace_back(offset + i, 0, 0);
  return c;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("accumulate_scans") {
  const std::vector<PointCloud> scans{cloud_n(3, 0), cloud_n(4, 100), cloud_n(5, 200)};
  const auto latest = accumulate_scans(scans, 1);
  CHECK(latest.points == scans.back().points);
  CHECK(accumulate_scans(scans, 3).size() == 12);
  CHECK(accumulate_scans(scans, 2).size() == 9);
  CHECK(code_of([&] { accumulate_scans(scans, 4); }) == ErrorCode::InsufficientFrames);
  CHECK(PipelineConfig{}.k_f == 10);
  CHECK(PipelineConfig{}.k_c == 5);
}

TEST_CASE("local query grid keeps the sensor voxel and its neighbors free") {
  PointCloud c;
  c.frame = Frame::Sensor;
  c.points = {Point3(0.05, 0.0, 0.0), Point3(3, 1, 0.5), Point3(-2, -4, 1)};
  const auto g = local_query_grid(c, 0.2, 50.0);
  const auto v = g.voxel_of(Point3::Zero());
  CHECK((g.center(v) - Point3::Zero()).norm() < 1e-9);
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) CHECK_FALSE(g.occupied({v.x + dx, v.y + dy, v.z + dz}));
  CHECK(g.occupied(g.voxel_of(Point3(3, 1, 0.5))));
  CHECK(g.occupied(g.voxel_of(Point3(-2, -4, 1))));
}

TEST_CASE("query descriptor: empty input is an error") {
  CHECK(code_of([] { make_query_descriptor(PointCloud{}, PipelineConfig{}); }) == ErrorCode::EmptyQuery);
}

TEST_CASE("a stationary scan at a database position retrieves that entry first") {
  const auto& s = scene();
  PipelineConfig cfg;
  int checked = 0;
  for (std::size_t i = 0; i < s.db.size(); i += 5) {
    const auto pose = RigidTransform::from_yaw(0.0, s.db.entries[i].position);
    const auto frames = simulate_observation(s.grid, pose, cfg.sensor, cfg.k_f, 0.0, 1);
    const auto q = make_query_descriptor(accumulate_scans(frames, cfg.k_f), cfg);
    const auto top = query(s.db, q, 2, static_cast<int>(s.db.size()));
    CHECK(top[0].index == i);
    CHECK(top[0].distance < top[1].distance);
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("noisy retrieval keeps the nearest database sample in the top K_c") {
  const auto& s = scene();
  PipelineConfig cfg;
  cfg.prefilter = static_cast<int>(s.db.size());
  std::mt19937_64 rng(31);
  const auto poses = draw_feasible_poses(s.grid, s.sampler, 100, 77);
  int hits = 0;
  for (std::size_t t = 0; t < poses.size(); ++t) {
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < s.db.size(); ++i)
      if ((s.db.entries[i].position - poses[t].translation).norm() <
          (s.db.entries[nearest].position - poses[t].translation).norm())
        nearest = i;
    const auto frames = simulate_observation(s.grid, poses[t], cfg.sensor, cfg.k_f, 0.02, rng());
    const auto q = make_query_descriptor(accumulate_scans(frames, cfg.k_f), cfg);
    const auto top = query(s.db, q, cfg.k_c, cfg.prefilter_size());
    for (const auto& c : top) hits += c.index == nearest;
  }
  CHECK(hits >= 95);
}

TEST_CASE("closed-loop relocalization on a small world") {
  const auto& s = scene();
  PipelineConfig cfg;
  cfg.map_voxel = 0.1;
  cfg.tau = 0.1;
  cfg.icp.max_iterations = 200;
  const auto poses = draw_feasible_poses(s.grid, s.sampler, 5, 8);
  int accepted = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto frames = simulate_observation(s.grid, poses[i], cfg.sensor, cfg.k_f, 0.0, i, ReturnModel::SurfaceHit);
    const auto out = relocalize(s.db, s.map, frames, cfg);
    if (out.status != Status::Accepted) continue;
    ++accepted;
    CHECK(out.candidate_rank_used >= 1);
    CHECK(out.rmse <= cfg.tau);
    CHECK((out.pose.translation - poses[i].translation).norm() <= 2 * 0.2);
    CHECK(std::abs(rad2deg(wrap_angle(out.pose.yaw() - poses[i].yaw()))) <= 1.0);
    CHECK(out.timings.total >= out.timings.retrieve);
  }
  CHECK(accepted >= 4);
}

TEST_CASE("an unreachable gate fails after exactly K_c refinements") {
  const auto& s = scene();
  PipelineConfig cfg;
  cfg.tau = 1e-9;
  const auto pose = draw_feasible_poses(s.grid, s.sampler, 1, 3)[0];
  const auto frames = simulate_observation(s.grid, pose, cfg.sensor, cfg.k_f, 0.02, 9);
  const auto out = relocalize(s.db, s.map, frames, cfg);
  CHECK(out.status == Status::Failed);
  CHECK(out.attempts.size() == static_cast<std::size_t>(cfg.k_c));
  CHECK(out.timings.icp.size() == static_cast<std::size_t>(cfg.k_c));
  CHECK(out.candidate_rank_used == 0);
}

TEST_CASE("relocalize input errors") {
  const auto& s = scene();
  PipelineConfig cfg;
  const auto frames = simulate_observation(s.grid, RigidTransform::from_yaw(0, s.db.entries[0].position), cfg.sensor,
                                           cfg.k_f, 0.0, 1);
  PipelineConfig other = cfg;
  other.sc.n_sectors = 30;
  CHECK(code_of([&] { relocalize(s.db, s.map, frames, other); }) == ErrorCode::ConfigMismatch);
  CHECK(code_of([&] { relocalize(DescriptorDatabase{}, s.map, frames, cfg); }) == ErrorCode::EmptyDatabase);
  const std::vector<PointCloud> few(frames.begin(), frames.begin() + 3);
  CHECK(code_of([&] { relocalize(s.db, s.map, few, cfg); }) == ErrorCode::InsufficientFrames);
}
