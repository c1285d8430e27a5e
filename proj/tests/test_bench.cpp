#include "reloc/bench.hpp"
#include "reloc/error.hpp"
#include "reloc/kdtree.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace reloc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Number of voxel centers of a dims grid at resolution r inside the primitive.
std::size_t membership_count(const Primitive& prim, const std::array<int, 3>& dims, double r) {
  std::size_t n = 0;
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x) n += prim.contains(Point3((x + 0.5) * r, (y + 0.5) * r, (z + 0.5) * r));
  return n;
}

}  // namespace

TEST_CASE("generate_world: empty spec, wall count and determinism") {
  WorldSpec empty;
  empty.extent = Vec3(4, 4, 2);
  CHECK(generate_world(empty, 0.2).occupied_count() == 0);

  WorldSpec w;
  w.extent = Vec3(12, 4, 4);
  w.primitives = {{Primitive::Kind::Wall, Point3(1, 1, 0), Point3(11, 1.2, 3)}};
  const auto g = generate_world(w, 0.2);
  CHECK(g.occupied_count() == 750);
  CHECK(membership_count(w.primitives[0], g.dims(), 0.2) == 750);

  const auto corridor = corridor_world();
  CHECK(generate_world(corridor, 0.2) == generate_world(corridor, 0.2));

  WorldSpec bad = w;
  bad.primitives[0].max.x() = 13.0;
  try {
    generate_world(bad, 0.2);
    FAIL("expected SpecError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpecError);
  }
}

TEST_CASE("ramp primitive follows its plane") {
  const Primitive ramp{Primitive::Kind::Ramp, Point3(0, 0, 0), Point3(10, 2, 5), 0};
  CHECK(ramp.contains(Point3(8, 1, 3.9)));
  CHECK_FALSE(ramp.contains(Point3(2, 1, 1.1)));
  CHECK(ramp.contains(Point3(2, 1, 0.9)));
}

TEST_CASE("shipped world files describe the built-in worlds") {
  for (const auto& [file, builtin] : {std::pair{"corridor.json", corridor_world()}, {"slope.json", slope_world()}}) {
    const auto spec = world_from_json(slurp(std::string(RELOC_SOURCE_DIR) + "/worlds/" + file));
    CHECK(spec.name == builtin.name);
    CHECK(world_to_json(spec) == world_to_json(builtin));
    CHECK(generate_world(spec, 0.2) == generate_world(builtin, 0.2));
  }
  CHECK(corridor_world().extent == Vec3(60, 20, 8));
  CHECK(slope_world().extent == Vec3(60, 40, 12));
}

TEST_CASE("simulate_observation: zero noise reproduces synthesize_scan") {
  const auto grid = generate_world(corridor_world(), 0.2);
  const SensorModel m;
  const Point3 p(30.3, 5.1, 2.0);
  const auto pose = RigidTransform::from_yaw(0.4, p);
  const auto frames = simulate_observation(grid, pose, m, 3, 0.0, 1);
  REQUIRE(frames.size() == 3);
  const auto expected = to_sensor_frame(synthesize_scan(grid, p, pose.rotation, m), p, pose.rotation);
  for (const auto& f : frames) {
    CHECK(f.frame == Frame::Sensor);
    CHECK(f.points == expected.points);
  }
}

TEST_CASE("simulate_observation: noise statistics") {
  const auto grid = generate_world(corridor_world(), 0.2);
  const auto pose = RigidTransform::from_yaw(1.0, Point3(20.5, 6.3, 2.2));
  const auto clean = simulate_observation(grid, pose, SensorModel{}, 1, 0.0, 3)[0];
  const auto noisy = simulate_observation(grid, pose, SensorModel{}, 2, 0.02, 3);
  REQUIRE(clean.size() > 3000);
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (const auto& f : noisy)
    for (std::size_t k = 0; k < f.size(); ++k)
      for (int a = 0; a < 3; ++a) {
        const double d = f.points[k][a] - clean.points[k][a];
        sum += d;
        sum2 += d * d;
        ++n;
      }
  REQUIRE(n >= 10000);
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(sd - 0.02) <= 0.1 * 0.02);
  CHECK(noisy[0].points != noisy[1].points);
}

TEST_CASE("simulate_observation: a yawed pose sees the same scene rotated back") {
  const auto grid = generate_world(corridor_world(), 0.2);
  const Point3 p(40.3, 12.7, 2.1);
  const auto level = simulate_observation(grid, RigidTransform::from_yaw(0.0, p), SensorModel{}, 1, 0.0, 1)[0];
  const double yaw = deg2rad(37.0);
  const auto yawed = simulate_observation(grid, RigidTransform::from_yaw(yaw, p), SensorModel{}, 1, 0.0, 1)[0];
  const KdTree tree(level.points);
  const Mat3 rz = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  int far = 0;
  for (const auto& y : yawed.points) far += tree.nearest(rz * y).dist2 > 0.2 * 0.2;
  CHECK(far == 0);
  CHECK(yawed.size() == level.size());
}

TEST_CASE("simulate_observation: surface returns lie on the struck voxel's boundary") {
  const auto grid = generate_world(corridor_world(), 0.2);
  const auto pose = RigidTransform::from_yaw(-0.7, Point3(12.5, 4.5, 2.5));
  const auto frames = simulate_observation(grid, pose, SensorModel{}, 1, 0.0, 1, ReturnModel::SurfaceHit);
  const auto centers = simulate_observation(grid, pose, SensorModel{}, 1, 0.0, 1, ReturnModel::VoxelCenter);
  REQUIRE(frames[0].size() == centers[0].size());
  for (std::size_t k = 0; k < frames[0].size(); k += 37) {
    const Vec3 d = (pose.rotation * (frames[0].points[k] - centers[0].points[k])).cwiseAbs();
    CHECK(d.maxCoeff() == doctest::Approx(0.1).epsilon(1e-6));
  }
}

TEST_CASE("simulate_observation: a pose inside an obstacle is rejected") {
  const auto grid = generate_world(corridor_world(), 0.2);
  try {
    simulate_observation(grid, RigidTransform::from_yaw(0, Point3(5, 0.2, 1)), SensorModel{}, 1, 0.0, 1);
    FAIL("expected InvalidPose");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPose);
  }
}

TEST_CASE("surface_samples puts per_edge^2 points on every exposed face") {
  OccupancyGrid g(Point3::Zero(), 1.0, {3, 3, 3});
  g.set_occupied({1, 1, 1});
  const auto s = surface_samples(g, 2);
  CHECK(s.size() == 6 * 4);
  for (const auto& p : s.points) CHECK((p - Point3(1.5, 1.5, 1.5)).cwiseAbs().maxCoeff() == doctest::Approx(0.5));
  g.set_occupied({2, 1, 1});
  CHECK(surface_samples(g, 3).size() == 10 * 9 - 9);  // the face at the grid border is not exposed
}

TEST_CASE("success rule and summary recomputation") {
  std::vector<TrialRecord> recs;
  auto add = [&](double dx, double dyaw_deg, bool accepted, double elapsed) {
    TrialRecord r;
    r.ground_truth = RigidTransform::from_yaw(0.3, Point3(1, 2, 3));
    r.status = accepted ? Status::Accepted : Status::Failed;
    r.estimate = RigidTransform::from_yaw(0.3 + deg2rad(dyaw_deg), Point3(1 + dx, 2, 3));
    r.elapsed = elapsed;
    score_trial(r);
    recs.push_back(r);
  };
  add(0.1, 0.5, true, 1.0);
  add(0.3, -1.5, true, 2.0);
  add(4.5, 0.0, true, 3.0);   // too far
  add(0.2, 25.0, true, 4.0);  // heading off
  add(0.0, 0.0, false, 5.0);
  add(4.0, 20.0, true, 6.0);  // on the boundary: success

  // Hand computation over the successful trials 0, 1 and 5.
  const double e_p = (0.1 + 0.3 + 4.0) / 3.0;
  const double e_psi = (0.5 + 1.5 + 20.0) / 3.0;
  const auto s = summarize(recs);
  CHECK(s.trials == 6);
  CHECK(s.accepted == 5);
  CHECK(s.successes == 3);
  CHECK(s.sr == doctest::Approx(50.0));
  CHECK(s.e_p == doctest::Approx(e_p).epsilon(1e-9));
  CHECK(s.e_psi == doctest::Approx(e_psi).epsilon(1e-9));
  CHECK(s.t_bar == doctest::Approx(3.5));
  CHECK_FALSE(recs[4].success);
  CHECK(std::isinf(recs[4].d_err));
}

TEST_CASE("evaluation bookkeeping: summary equals recomputation, CSV and JSON carry every trial") {
  std::vector<TrialRecord> recs(3);
  for (int i = 0; i < 3; ++i) {
    recs[i].pose_index = i;
    recs[i].status = Status::Accepted;
    recs[i].estimate.translation = Vec3(0.1 * i, 0, 0);
    recs[i].elapsed = 0.5;
    score_trial(recs[i]);
  }
  EvalReport rep{summarize(recs), recs};
  CHECK(rep.summary.sr == 100.0);
  const auto j = report_to_json(rep);
  CHECK(j.find("\"SR\": 100.0") != std::string::npos);
  std::ostringstream csv;
  write_trials_csv(csv, recs);
  int lines = 0;
  for (char c : csv.str()) lines += c == '\n';
  CHECK(lines == 4);
}

TEST_CASE("poses file round trip and seeds") {
  std::vector<RigidTransform> poses{RigidTransform::from_yaw(1.25, Point3(1, 2, 3)),
                                    RigidTransform::from_yaw(-3.0, Point3(-4.5, 0.25, 7))};
  std::stringstream ss;
  write_poses(ss, poses);
  const auto back = read_poses(ss);
  REQUIRE(back.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK((back[i].translation - poses[i].translation).norm() == 0.0);
    CHECK(back[i].yaw() == doctest::Approx(poses[i].yaw()).epsilon(1e-15));
  }
  CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
  CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
  CHECK(EvalOptions{}.trials_per_pose == 20);
}

TEST_CASE("world JSON round trip") {
  const auto w = slope_world();
  const auto back = world_from_json(world_to_json(w));
  CHECK(world_to_json(back) == world_to_json(w));
  CHECK_THROWS_AS(world_from_json("{\"extent\": [1, 2, 3], \"primitives\": [{\"type\": \"cone\"}]}"), Error);
}
