#include "reloc/descriptor.hpp"

#include "reloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace reloc {

void ScParams::validate() const {
  if (n_rings < 1 || n_sectors < 2 || !(l_max > 0.0) || !std::isfinite(z_offset))
    throw Error(ErrorCode::InvalidArgument, "invalid scan context parameters");
}

ScanContext encode(const PointCloud& sensor_cloud, const ScParams& params) {
  params.validate();
  ScanContext sc{params, DescriptorMatrix::Zero(params.n_rings, params.n_sectors)};
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(params.n_rings, params.n_sectors, false);
  Eigen::MatrixXd best(params.n_rings, params.n_sectors);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double ring_width = params.l_max / params.n_rings;
  const double sector_width = two_pi / params.n_sectors;

  for (const auto& p : sensor_cloud.points) {
    const double range = std::hypot(p.x(), p.y());
    if (!(range < params.l_max)) continue;
    double az = std::atan2(p.y(), p.x());
    if (az < 0.0) az += two_pi;
    const int u = std::min(static_cast<int>(range / ring_width), params.n_rings - 1);
    const int v = std::min(static_cast<int>(az / sector_width), params.n_sectors - 1);
    const double h = p.z() + params.z_offset;
    if (!filled(u, v) || h > best(u, v)) {
      best(u, v) = h;
      filled(u, v) = true;
    }
  }
  for (int u = 0; u < params.n_rings; ++u)
    for (int v = 0; v < params.n_sectors; ++v)
      if (filled(u, v)) sc.values(u, v) = static_cast<float>(best(u, v));
  return sc;
}

RingKey ring_key(const ScanContext& sc) {
  const auto rows = sc.values.rows();
  const auto cols = sc.values.cols();
  RingKey key(rows);
  for (Eigen::Index u = 0; u < rows; ++u) {
    int n = 0;
    for (Eigen::Index v = 0; v < cols; ++v) n += sc.values(u, v) != 0.0f;
    key(u) = static_cast<float>(n) / static_cast<float>(cols);
  }
  return key;
}

ScanContext circshift(const ScanContext& sc, int shift) {
  const int n = static_cast<int>(sc.values.cols());
  const int s = ((shift % n) + n) % n;
  ScanContext out{sc.params, DescriptorMatrix(sc.values.rows(), n)};
  for (int j = 0; j < n; ++j) out.values.col((j + s) % n) = sc.values.col(j);
  return out;
}

ShiftMatch sc_distance(const ScanContext& query, const ScanContext& candidate) {
  if (!(query.params == candidate.params) || query.values.rows() != candidate.values.rows() ||
      query.values.cols() != candidate.values.cols())
    throw Error(ErrorCode::IncompatibleDescriptors);

  const int n = static_cast<int>(query.values.cols());
  const int rings = static_cast<int>(query.values.rows());
  const Eigen::MatrixXd q = query.values.cast<double>();
  const Eigen::MatrixXd c = candidate.values.cast<double>();

  // Same summation order for dots and squared norms, so identical columns give
  // a cosine of exactly 1.
  auto dot = [&](const Eigen::MatrixXd& a, int ja, const Eigen::MatrixXd& b, int jb) {
    double s = 0.0;
    for (int u = 0; u < rings; ++u) s += a(u, ja) * b(u, jb);
    return s;
  };
  Eigen::VectorXd qn2(n), cn2(n);
  for (int j = 0; j < n; ++j) {
    qn2(j) = dot(q, j, q, j);
    cn2(j) = dot(c, j, c, j);
  }
  Eigen::MatrixXd dots(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) dots(j, k) = qn2(j) > 0.0 && cn2(k) > 0.0 ? dot(q, j, c, k) : 0.0;

  ShiftMatch best{2.0, 0};
  for (int shift = 0; shift < n; ++shift) {
    double sum = 0.0;
    int count = 0;
    for (int j = 0; j < n; ++j) {
      const int k = (j + shift) % n;
      const double denom = std::sqrt(qn2(j) * cn2(k));
      if (denom > 0.0) {
        sum += std::max(0.0, 1.0 - dots(j, k) / denom);
        ++count;
      }
    }
    const double d = count > 0 ? sum / count : 1.0;
    if (d < best.distance) best = {d, shift};
  }
  return best;
}

double shift_to_yaw(int shift, int n_sectors) {
  if (n_sectors < 1 || shift < 0 || shift >= n_sectors) throw Error(ErrorCode::InvalidShift);
  return wrap_angle(2.0 * std::numbers::pi * shift / n_sectors);
}

ScanContext descriptor_at(const OccupancyGrid& grid, const Point3& p, const SensorModel& sensor,
                          const ScParams& params) {
  const PointCloud scan = synthesize_scan(grid, p, sensor);
  return encode(to_sensor_frame(scan, p, sensor.rotation), params);
}

DescriptorDatabase build_database(const OccupancyGrid& grid, const CandidateSet& samples,
                                  const SensorModel& sensor, const ScParams& params, int threads) {
  sensor.validate();
  params.validate();
  DescriptorDatabase db{params, sensor, grid.resolution(), {}};
  db.entries.resize(samples.size());

  auto work = [&](std::size_t i) {
    const Point3& p = samples.positions[i];
    ScanContext sc = descriptor_at(grid, p, sensor, params);
    RingKey key = ring_key(sc);
    db.entries[i] = DatabaseEntry{p, std::move(sc), std::move(key)};
  };

  std::size_t n_threads = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, std::max<std::size_t>(1, samples.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) work(i);
    return db;
  }
  // Static interleaved partition; each slot is written by exactly one worker.
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < n_threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < samples.size(); i += n_threads) work(i);
    });
  pool.clear();
  return db;
}

int default_prefilter(int k_c) { return std::max(10 * k_c, 50); }

std::vector<RetrievalCandidate> query(const DescriptorDatabase& db, const ScanContext& q, int k_c,
                                      int prefilter) {
  if (db.empty()) throw Error(ErrorCode::EmptyDatabase);
  if (k_c < 1 || prefilter < k_c) throw Error(ErrorCode::InvalidArgument, "need 1 <= k_c <= prefilter");
  if (!(q.params == db.params)) throw Error(ErrorCode::IncompatibleDescriptors);

  const RingKey qk = ring_key(q);
  std::vector<std::pair<double, std::size_t>> coarse;
  coarse.reserve(db.size());
  for (std::size_t i = 0; i < db.size(); ++i)
    coarse.emplace_back((db.entries[i].key - qk).cast<double>().squaredNorm(), i);
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(prefilter), coarse.size());
  std::partial_sort(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(keep), coarse.end());

  std::vector<RetrievalCandidate> ranked;
  ranked.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    const std::size_t i = coarse[r].second;
    const ShiftMatch m = sc_distance(q, db.entries[i].descriptor);
    ranked.push_back({i, db.entries[i].position, shift_to_yaw(m.shift, db.params.n_sectors), m.distance, m.shift});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  if (ranked.size() > static_cast<std::size_t>(k_c)) ranked.resize(static_cast<std::size_t>(k_c));
  return ranked;
}

}  // namespace reloc
