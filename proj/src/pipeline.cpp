#include "reloc/pipeline.hpp"

#include "reloc/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace reloc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (k_f < 1 || k_c < 1 || !(tau > 0.0) || !(grid_resolution > 0.0) || !(query_voxel > 0.0) ||
      !(map_voxel > 0.0))
    throw Error(ErrorCode::InvalidArgument, "invalid pipeline configuration");
  if (prefilter_size() < k_c) throw Error(ErrorCode::InvalidArgument, "prefilter must be >= k_c");
  sensor.validate();
  sc.validate();
  icp.validate();
}

const char* to_string(Status s) { return s == Status::Accepted ? "accepted" : "failed"; }

PointCloud accumulate_scans(std::span<const PointCloud> scans, int k_f) {
  if (k_f < 1) throw Error(ErrorCode::InvalidArgument, "k_f must be >= 1");
  if (scans.size() < static_cast<std::size_t>(k_f)) throw Error(ErrorCode::InsufficientFrames);
  PointCloud out;
  out.frame = Frame::Sensor;
  std::size_t total = 0;
  for (std::size_t i = scans.size() - k_f; i < scans.size(); ++i) total += scans[i].size();
  out.points.reserve(total);
  for (std::size_t i = scans.size() - k_f; i < scans.size(); ++i)
    out.points.insert(out.points.end(), scans[i].points.begin(), scans[i].points.end());
  return out;
}

OccupancyGrid local_query_grid(const PointCloud& accumulated, double resolution, double extent) {
  if (accumulated.empty()) throw Error(ErrorCode::EmptyQuery);
  // Voxel k spans [(k - 0.5) r, (k + 0.5) r) so the sensor sits at the center of voxel 0.
  auto cell = [&](double v) { return static_cast<long>(std::floor(v / resolution + 0.5)); };
  const long reach = static_cast<long>(std::ceil(extent / resolution));

  std::array<long, 3> lo{-1, -1, -1}, hi{1, 1, 1};
  std::vector<const Point3*> kept;
  kept.reserve(accumulated.size());
  for (const auto& p : accumulated.points) {
    if (!is_finite(p)) throw Error(ErrorCode::InvalidPoint);
    if (p.cwiseAbs().maxCoeff() > extent) continue;
    kept.push_back(&p);
    for (int a = 0; a < 3; ++a) {
      const long c = std::clamp(cell(p[a]), -reach, reach);
      lo[a] = std::min(lo[a], c);
      hi[a] = std::max(hi[a], c);
    }
  }
  // One spare layer on each side absorbs rounding at cell faces.
  std::array<int, 3> dims{};
  Point3 origin;
  for (int a = 0; a < 3; ++a) {
    lo[a] -= 1;
    hi[a] += 1;
    dims[a] = static_cast<int>(hi[a] - lo[a] + 1);
    origin[a] = (static_cast<double>(lo[a]) - 0.5) * resolution;
  }
  OccupancyGrid grid(origin, resolution, dims);
  for (const Point3* p : kept) grid.set_occupied(grid.voxel_of(*p));

  const VoxelIndex center = grid.voxel_of(Point3::Zero());
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) grid.set_occupied({center.x + dx, center.y + dy, center.z + dz}, false);
  return grid;
}

ScanContext make_query_descriptor(const PointCloud& accumulated, const PipelineConfig& cfg) {
  if (accumulated.empty()) throw Error(ErrorCode::EmptyQuery);
  const OccupancyGrid local = local_query_grid(accumulated, cfg.grid_resolution, cfg.sensor.range);
  SensorModel sensor = cfg.sensor;
  sensor.rotation = Mat3::Identity();
  PointCloud scan = synthesize_scan(local, Point3::Zero(), sensor);
  scan.frame = Frame::Sensor;
  return encode(scan, cfg.sc);
}

RigidTransform initial_hypothesis(const RetrievalCandidate& c, double roll, double pitch) {
  return RigidTransform::from_rpy(roll, pitch, c.yaw, c.position);
}

Relocalizer::Relocalizer(const DescriptorDatabase& db, const PointCloud& global_map, const PipelineConfig& cfg)
    : db_(db), cfg_(cfg) {
  cfg_.validate();
  if (db.empty()) throw Error(ErrorCode::EmptyDatabase);
  if (!(cfg_.sc == db.params)) throw Error(ErrorCode::ConfigMismatch, "scan context parameters differ");
  if (global_map.empty()) throw Error(ErrorCode::EmptyInput, "global map");
  const auto start = Clock::now();
  map_index_ = KdTree(voxel_downsample(global_map, cfg_.map_voxel).points);
  map_seconds_ = seconds_since(start);
}

RelocalizationOutcome Relocalizer::run(std::span<const PointCloud> scans) const {
  RelocalizationOutcome out;
  const auto start = Clock::now();

  auto t = Clock::now();
  const PointCloud accumulated = accumulate_scans(scans, cfg_.k_f);
  out.timings.accumulate = seconds_since(t);

  t = Clock::now();
  const ScanContext q = make_query_descriptor(accumulated, cfg_);
  out.timings.encode = seconds_since(t);

  t = Clock::now();
  const auto candidates = query(db_, q, cfg_.k_c, cfg_.prefilter_size());
  out.timings.retrieve = seconds_since(t);

  t = Clock::now();
  const PointCloud source = voxel_downsample(accumulated, cfg_.query_voxel);
  out.timings.downsample = seconds_since(t);

  for (std::size_t m = 0; m < candidates.size(); ++m) {
    t = Clock::now();
    const RigidTransform t0 = initial_hypothesis(candidates[m], cfg_.default_roll, cfg_.default_pitch);
    RegistrationResult reg = gn_icp(source, map_index_, t0, cfg_.icp);
    out.timings.icp.push_back(seconds_since(t));
    out.attempts.push_back({candidates[m], reg});
    if (reg.rmse <= cfg_.tau) {
      out.status = Status::Accepted;
      out.pose = reg.pose;
      out.rmse = reg.rmse;
      out.candidate_rank_used = static_cast<int>(m + 1);
      break;
    }
  }
  if (out.status == Status::Failed && !out.attempts.empty()) {
    auto best = std::min_element(out.attempts.begin(), out.attempts.end(), [](const auto& a, const auto& b) {
      return a.registration.rmse < b.registration.rmse;
    });
    out.rmse = best->registration.rmse;
  }
  out.timings.total = seconds_since(start);
  return out;
}

RelocalizationOutcome relocalize(const DescriptorDatabase& db, const PointCloud& global_map,
                                 std::span<const PointCloud> scans, const PipelineConfig& cfg) {
  const auto start = Clock::now();
  const Relocalizer matcher(db, global_map, cfg);
  RelocalizationOutcome out = matcher.run(scans);
  out.timings.downsample += matcher.map_downsample_seconds();
  out.timings.total = seconds_since(start);
  return out;
}

}  // namespace reloc
