#include "reloc/io.hpp"

#include "reloc/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace reloc {

namespace fs = std::filesystem;

namespace {

constexpr char kCloudMagic[4] = {'R', '3', 'P', 'C'};
constexpr char kDatabaseMagic[4] = {'R', '3', 'D', 'B'};

// Little-endian primitives, independent of host byte order.
template <typename U>
void put_uint(std::ostream& os, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, sizeof(U));
}

template <typename U>
U get_uint(std::istream& is) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) throw Error(ErrorCode::Truncated);
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double v) { put_uint(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_uint<std::uint64_t>(is)); }
void put_f32(std::ostream& os, float v) { put_uint(os, std::bit_cast<std::uint32_t>(v)); }
float get_f32(std::istream& is) { return std::bit_cast<float>(get_uint<std::uint32_t>(is)); }

void expect_magic(std::istream& is, const char (&magic)[4]) {
  char buf[4];
  if (!is.read(buf, 4)) throw Error(ErrorCode::Truncated, "missing magic");
  if (std::memcmp(buf, magic, 4) != 0) throw Error(ErrorCode::BadMagic);
}

void expect_version(std::istream& is, std::uint32_t supported) {
  const auto v = get_uint<std::uint32_t>(is);
  if (v != supported) throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(v));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return is;
}

}  // namespace

void write_cloud_text(std::ostream& os, const PointCloud& cloud) {
  for (const auto& p : cloud.points)
    os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
}

PointCloud read_cloud_text(std::istream& is, Frame frame) {
  PointCloud cloud;
  cloud.frame = frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no));
    std::string rest;
    if (ls >> rest) throw Error(ErrorCode::ParseError, "trailing data on line " + std::to_string(line_no));
    const Point3 p(x, y, z);
    if (!is_finite(p)) throw Error(ErrorCode::InvalidPoint, "line " + std::to_string(line_no));
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_cloud_binary(std::ostream& os, const PointCloud& cloud) {
  os.write(kCloudMagic, 4);
  put_uint<std::uint32_t>(os, kCloudVersion);
  put_uint<std::uint64_t>(os, cloud.size());
  for (const auto& p : cloud.points) {
    put_f64(os, p.x());
    put_f64(os, p.y());
    put_f64(os, p.z());
  }
}

PointCloud read_cloud_binary(std::istream& is, Frame frame) {
  expect_magic(is, kCloudMagic);
  expect_version(is, kCloudVersion);
  const auto count = get_uint<std::uint64_t>(is);
  PointCloud cloud;
  cloud.frame = frame;
  cloud.points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double x = get_f64(is), y = get_f64(is), z = get_f64(is);
    const Point3 p(x, y, z);
    if (!is_finite(p)) throw Error(ErrorCode::InvalidPoint, "point " + std::to_string(i));
    cloud.points.push_back(p);
  }
  return cloud;
}

PointCloud load_cloud(const fs::path& path, Frame frame) {
  std::ifstream is = open_in(path);
  char head[4] = {};
  is.read(head, 4);
  const bool binary = is.gcount() == 4 && std::memcmp(head, kCloudMagic, 4) == 0;
  is.clear();
  is.seekg(0);
  return binary ? read_cloud_binary(is, frame) : read_cloud_text(is, frame);
}

void save_cloud(const fs::path& path, const PointCloud& cloud) {
  std::ofstream os = open_out(path);
  if (path.extension() == ".r3pc")
    write_cloud_binary(os, cloud);
  else
    write_cloud_text(os, cloud);
}

std::vector<PointCloud> load_scans(const fs::path& path) {
  if (!fs::is_directory(path)) return {load_cloud(path, Frame::Sensor)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".xyz" || ext == ".txt" || ext == ".r3pc")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PointCloud> scans;
  for (const auto& f : files) scans.push_back(load_cloud(f, Frame::Sensor));
  return scans;
}

void write_database(std::ostream& os, const DescriptorDatabase& db) {
  const auto& sc = db.params;
  os.write(kDatabaseMagic, 4);
  put_uint<std::uint32_t>(os, kDatabaseVersion);
  put_uint<std::uint32_t>(os, static_cast<std::uint32_t>(sc.n_rings));
  put_uint<std::uint32_t>(os, static_cast<std::uint32_t>(sc.n_sectors));
  put_f64(os, sc.l_max);
  put_f64(os, sc.z_offset);

  const auto& s = db.sensor;
  for (double v : {s.az_min, s.az_max, s.az_step, s.el_min, s.el_max, s.el_step, s.range}) put_f64(os, v);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) put_f64(os, s.rotation(r, c));
  put_f64(os, db.resolution);
  put_uint<std::uint64_t>(os, db.size());

  for (const auto& e : db.entries) {
    if (e.descriptor.values.rows() != sc.n_rings || e.descriptor.values.cols() != sc.n_sectors ||
        e.key.size() != sc.n_rings)
      throw Error(ErrorCode::IncompatibleDescriptors, "entry shape differs from database parameters");
    put_f64(os, e.position.x());
    put_f64(os, e.position.y());
    put_f64(os, e.position.z());
    for (Eigen::Index u = 0; u < e.key.size(); ++u) put_f32(os, e.key(u));
    for (Eigen::Index u = 0; u < e.descriptor.values.rows(); ++u)
      for (Eigen::Index v = 0; v < e.descriptor.values.cols(); ++v) put_f32(os, e.descriptor.values(u, v));
  }
}

DescriptorDatabase read_database(std::istream& is) {
  expect_magic(is, kDatabaseMagic);
  expect_version(is, kDatabaseVersion);
  DescriptorDatabase db;
  db.params.n_rings = static_cast<int>(get_uint<std::uint32_t>(is));
  db.params.n_sectors = static_cast<int>(get_uint<std::uint32_t>(is));
  db.params.l_max = get_f64(is);
  db.params.z_offset = get_f64(is);
  db.params.validate();

  auto& s = db.sensor;
  for (double* v : {&s.az_min, &s.az_max, &s.az_step, &s.el_min, &s.el_max, &s.el_step, &s.range}) *v = get_f64(is);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s.rotation(r, c) = get_f64(is);
  db.resolution = get_f64(is);
  const auto count = get_uint<std::uint64_t>(is);

  const int nr = db.params.n_rings, ns = db.params.n_sectors;
  db.entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    DatabaseEntry e;
    e.position.x() = get_f64(is);
    e.position.y() = get_f64(is);
    e.position.z() = get_f64(is);
    e.key.resize(nr);
    for (int u = 0; u < nr; ++u) e.key(u) = get_f32(is);
    e.descriptor.params = db.params;
    e.descriptor.values.resize(nr, ns);
    for (int u = 0; u < nr; ++u)
      for (int v = 0; v < ns; ++v) e.descriptor.values(u, v) = get_f32(is);
    db.entries.push_back(std::move(e));
  }
  return db;
}

void save_database(const fs::path& path, const DescriptorDatabase& db) {
  std::ofstream os = open_out(path);
  write_database(os, db);
}

DescriptorDatabase load_database(const fs::path& path) {
  std::ifstream is = open_in(path);
  return read_database(is);
}

void write_candidates(std::ostream& os, const CandidateSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& p = set.positions[i];
    os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << ' '
       << set.parents[i] << '\n';
  }
}

CandidateSet read_candidates(std::istream& is) {
  CandidateSet set;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x, y, z;
    int parent;
    if (!(ls >> x >> y >> z >> parent)) throw Error(ErrorCode::ParseError, "candidate line");
    set.positions.emplace_back(x, y, z);
    set.parents.push_back(parent);
  }
  return set;
}

void write_density_csv(std::ostream& os, const OccupancyGrid& grid, const CandidateSet& set) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& p : set.positions) {
    const VoxelIndex v = grid.voxel_of(p);
    ++counts[{v.x, v.y}];
  }
  os << "ix,iy,count\n";
  for (const auto& [key, n] : counts) os << key.first << ',' << key.second << ',' << n << '\n';
}

void write_grid_text(std::ostream& os, const OccupancyGrid& grid) {
  const auto& o = grid.origin();
  const auto& d = grid.dims();
  os << format_double(o.x()) << ' ' << format_double(o.y()) << ' ' << format_double(o.z()) << ' '
     << format_double(grid.resolution()) << ' ' << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
  bool current = false;
  std::size_t run = 0;
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const bool occ = grid.occupied({x, y, z});
        if (run > 0 && occ != current) {
          os << (current ? 1 : 0) << ' ' << run << '\n';
          run = 0;
        }
        current = occ;
        ++run;
      }
  if (run > 0) os << (current ? 1 : 0) << ' ' << run << '\n';
}

OccupancyGrid read_grid_text(std::istream& is) {
  double ox, oy, oz, r;
  std::array<int, 3> dims{};
  if (!(is >> ox >> oy >> oz >> r >> dims[0] >> dims[1] >> dims[2])) throw Error(ErrorCode::ParseError, "grid header");
  OccupancyGrid grid(Point3(ox, oy, oz), r, dims);
  const std::size_t total = grid.voxel_count();
  std::size_t pos = 0;
  int value;
  std::size_t run;
  while (is >> value >> run) {
    if (pos + run > total) throw Error(ErrorCode::ParseError, "run exceeds grid size");
    for (std::size_t i = 0; i < run; ++i, ++pos) {
      if (value == 0) continue;
      const int x = static_cast<int>(pos % dims[0]);
      const int y = static_cast<int>((pos / dims[0]) % dims[1]);
      const int z = static_cast<int>(pos / (static_cast<std::size_t>(dims[0]) * dims[1]));
      grid.set_occupied({x, y, z});
    }
  }
  if (pos != total) throw Error(ErrorCode::ParseError, "run lengths do not cover the grid");
  return grid;
}

}  // namespace reloc
