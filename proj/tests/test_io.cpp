#include "fixtures.hpp"
#include "reloc/error.hpp"
#include "reloc/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace reloc;
namespace fs = std::filesystem;

namespace {

DescriptorDatabase small_db() {
  const auto grid = generate_world(fixture::courtyard(), 0.2);
  CandidateSet set;
  set.positions = {Point3(10.1, 8.3, 1.5), Point3(4.2, 12.5, 2.0), Point3(16.7, 9.1, 1.1)};
  set.parents = {-1, 0, 1};
  auto db = build_database(grid, set, SensorModel{}, ScParams{}, 1);
  db.resolution = 0.2;
  return db;
}

ErrorCode read_error(const std::string& bytes, bool database) {
  std::istringstream is(bytes);
  try {
    if (database)
      read_database(is);
    else
      read_cloud_binary(is);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("database round trip is byte identical") {
  const auto db = small_db();
  std::ostringstream a;
  write_database(a, db);
  std::istringstream in(a.str());
  const auto back = read_database(in);
  std::ostringstream b;
  write_database(b, back);
  CHECK(a.str() == b.str());
  REQUIRE(back.size() == db.size());
  CHECK(back.sensor == db.sensor);
  CHECK(back.params == db.params);
  for (std::size_t i = 0; i < db.size(); ++i) {
    CHECK(back.entries[i].descriptor == db.entries[i].descriptor);
    CHECK(back.entries[i].key == db.entries[i].key);
    CHECK(back.entries[i].position == db.entries[i].position);
  }
  // Header: magic, version, 2 u32, 2 f64, 7 + 9 sensor f64, resolution, count.
  const std::size_t header = 4 + 4 + 8 + 16 + 16 * 8 + 8 + 8;
  CHECK(a.str().size() == header + db.size() * (24 + 4 * (20 + 20 * 60)));
}

TEST_CASE("corrupted magic, unknown version and truncation are distinct errors") {
  const auto db = small_db();
  std::ostringstream os;
  write_database(os, db);
  std::string bytes = os.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::string bad_version = bytes;
  bad_version[4] = 2;
  const std::string truncated = bytes.substr(0, bytes.size() - 5);
  CHECK(read_error(bad_magic, true) == ErrorCode::BadMagic);
  CHECK(read_error(bad_version, true) == ErrorCode::UnsupportedVersion);
  CHECK(read_error(truncated, true) == ErrorCode::Truncated);

  PointCloud c;
  c.points = {Point3(1, 2, 3)};
  std::ostringstream cs;
  write_cloud_binary(cs, c);
  std::string cb = cs.str();
  std::string cmagic = cb, cversion = cb;
  cmagic[3] = '?';
  cversion[5] = 1;
  CHECK(read_error(cmagic, false) == ErrorCode::BadMagic);
  CHECK(read_error(cversion, false) == ErrorCode::UnsupportedVersion);
}

TEST_CASE("binary cloud round trip is byte identical and lossless") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-100, 100);
  PointCloud c;
  for (int i = 0; i < 500; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  std::ostringstream a;
  write_cloud_binary(a, c);
  CHECK(a.str().size() == 4 + 4 + 8 + 500 * 24);
  std::istringstream in(a.str());
  const auto back = read_cloud_binary(in);
  CHECK(back.points == c.points);
  std::ostringstream b;
  write_cloud_binary(b, back);
  CHECK(a.str() == b.str());
}

TEST_CASE("text clouds: comments, round trip and parse errors") {
  std::istringstream in("# header\n1 2 3\n\n  4.5 -6 7e-1\n# trailing comment\n");
  const auto c = read_cloud_text(in);
  REQUIRE(c.size() == 2);
  CHECK(c.points[1] == Point3(4.5, -6, 0.7));

  std::ostringstream os;
  write_cloud_text(os, c);
  std::istringstream again(os.str());
  CHECK(read_cloud_text(again).points == c.points);

  std::istringstream bad("1 2\n");
  CHECK_THROWS_AS(read_cloud_text(bad), Error);
  std::istringstream extra("1 2 3 4\n");
  CHECK_THROWS_AS(read_cloud_text(extra), Error);
}

TEST_CASE("files: format chosen by extension and magic; scans sorted by name") {
  const fs::path dir = fs::temp_directory_path() / "reloc_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  PointCloud a, b;
  a.points = {Point3(1, 1, 1)};
  b.points = {Point3(2, 2, 2), Point3(3, 3, 3)};
  save_cloud(dir / "b.r3pc", b);
  save_cloud(dir / "a.xyz", a);
  CHECK(load_cloud(dir / "b.r3pc").points == b.points);
  CHECK(load_cloud(dir / "a.xyz").points == a.points);
  const auto scans = load_scans(dir);
  REQUIRE(scans.size() == 2);
  CHECK(scans[0].points == a.points);
  CHECK(scans[0].frame == Frame::Sensor);
  CHECK(scans[1].points == b.points);

  const auto db = small_db();
  save_database(dir / "db.r3db", db);
  CHECK(load_database(dir / "db.r3db").size() == db.size());
  fs::remove_all(dir);
}

TEST_CASE("candidate, density and grid exports") {
  CandidateSet set;
  set.positions = {Point3(0.1, 0.1, 0.5), Point3(0.15, 0.12, 1.5), Point3(1.1, 0.3, 0.5)};
  set.parents = {-1, 0, 0};
  std::stringstream cs;
  write_candidates(cs, set);
  const auto back = read_candidates(cs);
  CHECK(back.positions == set.positions);
  CHECK(back.parents == set.parents);

  OccupancyGrid g(Point3::Zero(), 0.5, {4, 2, 4});
  g.set_occupied({1, 1, 2});
  g.set_occupied({3, 0, 0});
  std::ostringstream dens;
  write_density_csv(dens, g, set);
  CHECK(dens.str().find("0,0,2") != std::string::npos);
  CHECK(dens.str().find("2,0,1") != std::string::npos);

  std::stringstream gs;
  write_grid_text(gs, g);
  CHECK(read_grid_text(gs) == g);
}
