#include "oracles.hpp"
#include "reloc/error.hpp"
#include "reloc/scansim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace reloc;

namespace {

// 10 x 10 x 4 m shell at r = 0.25.
OccupancyGrid shell() {
  OccupancyGrid g(Point3(-5, -5, -2), 0.25, {40, 40, 16});
  for (int z = 0; z < 16; ++z)
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x)
        if (x == 0 || y == 0 || z == 0 || x == 39 || y == 39 || z == 15) g.set_occupied({x, y, z});
  return g;
}

}  // namespace

TEST_CASE("default beam lattice has 360 x 30 beams") {
  const SensorModel m;
  const auto d = beam_directions(m);
  CHECK(d.size() == 10800);
  for (const auto& v : d) CHECK(v.norm() == doctest::Approx(1.0));
  // Elevation-major: the first 360 beams share the lowest elevation.
  CHECK(std::asin(d[0].z()) == doctest::Approx(deg2rad(-7.0)));
  CHECK(std::asin(d[359].z()) == doctest::Approx(deg2rad(-7.0)));
  CHECK(std::asin(d[360].z()) == doctest::Approx(deg2rad(-5.0)));
  CHECK(std::asin(d.back().z()) == doctest::Approx(deg2rad(51.0)));
}

TEST_CASE("single-beam lattices: axis and pole") {
  SensorModel m;
  m.az_min = m.az_max = 0.0;
  m.el_min = m.el_max = 0.0;
  auto d = beam_directions(m);
  REQUIRE(d.size() == 1);
  CHECK((d[0] - Vec3::UnitX()).norm() < 1e-12);
  m.el_min = m.el_max = 90.0;
  d = beam_directions(m);
  REQUIRE(d.size() == 1);
  CHECK((d[0] - Vec3::UnitZ()).norm() < 1e-12);
}

TEST_CASE("degenerate field of view is rejected") {
  SensorModel m;
  m.el_min = 10.0;
  m.el_max = 5.0;
  CHECK_THROWS_AS(beam_directions(m), Error);
  m = SensorModel{};
  m.az_step = 0.0;
  try {
    beam_directions(m);
    FAIL("expected EmptyBeamSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBeamSet);
  }
}

TEST_CASE("fov_directions stay inside the field of view") {
  const SensorModel m;
  const auto d = fov_directions(m, 12, 5);
  REQUIRE(d.size() == 60);
  for (const auto& v : d) {
    const double el = rad2deg(std::asin(v.z()));
    CHECK(el >= m.el_min - 1e-9);
    CHECK(el <= m.el_max + 1e-9);
  }
  CHECK(rad2deg(std::asin(d.front().z())) == doctest::Approx(-7.0));
  CHECK(rad2deg(std::asin(d.back().z())) == doctest::Approx(52.0));
  CHECK(rad2deg(std::atan2(d[3].y(), d[3].x())) == doctest::Approx(90.0));

  SensorModel tilted = m;
  tilted.rotation = Eigen::AngleAxisd(0.3, Vec3::UnitY()).toRotationMatrix();
  const auto t = fov_directions(tilted, 12, 5);
  for (std::size_t k = 0; k < d.size(); ++k) CHECK((t[k] - tilted.rotation * d[k]).norm() < 1e-12);
  CHECK_THROWS_AS(fov_directions(m, 0, 5), Error);
}

TEST_CASE("synthesize_scan: empty grid gives an empty cloud") {
  OccupancyGrid g(Point3(-5, -5, -5), 0.5, {20, 20, 20});
  CHECK(synthesize_scan(g, Point3::Zero(), SensorModel{}).empty());
}

TEST_CASE("synthesize_scan inside a shell equals the per-beam marching oracle") {
  const auto g = shell();
  SensorModel m;
  m.az_step = 6.0;
  m.el_step = 6.0;
  const Point3 p(0.1, -0.2, 0.05);
  const auto scan = synthesize_scan(g, p, m);
  std::vector<Point3> expected;
  for (const auto& d : beam_directions(m))
    if (auto v = oracle::march_first_return(g, p, d, m.range)) expected.push_back(g.center(*v));
  REQUIRE(scan.size() == expected.size());
  CHECK(scan.size() == beam_directions(m).size());  // the shell is closed
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK((scan.points[k] - expected[k]).norm() < 1e-12);
  CHECK(synthesize_scan(g, p, m).points == scan.points);
}

TEST_CASE("frame transforms") {
  PointCloud c;
  c.points = {Point3(1, 2, 3), Point3(-1, 0.5, 2)};
  auto same = to_sensor_frame(c, Point3::Zero(), Mat3::Identity());
  CHECK(same.points == c.points);
  CHECK(same.frame == Frame::Sensor);

  const Point3 p(4, 5, 6);
  PointCloud at_p;
  at_p.points = {p};
  CHECK(to_sensor_frame(at_p, p, Mat3::Identity()).points[0].norm() == 0.0);

  const Mat3 rz = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix();
  PointCloud one;
  one.points = {p + Vec3(1, 0, 0)};
  const auto local = to_sensor_frame(one, p, rz);
  CHECK((local.points[0] - Vec3(0, -1, 0)).norm() < 1e-12);
  CHECK((to_map_frame(local, p, rz).points[0] - one.points[0]).norm() < 1e-12);
}
