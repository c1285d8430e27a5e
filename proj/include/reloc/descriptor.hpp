#pragma once

#include "reloc/grid.hpp"
#include "reloc/sampler.hpp"
#include "reloc/scansim.hpp"
#include "reloc/types.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace reloc {

struct ScParams {
  int n_rings = 20;
  int n_sectors = 60;
  double l_max = 50.0;
  double z_offset = 0.0;

  void validate() const;
  friend bool operator==(const ScParams&, const ScParams&) = default;
};

using DescriptorMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RingKey = Eigen::VectorXf;

/// Polar max-height grid: rows are rings (radial bins), columns are sectors
/// (azimuth bins counter-clockwise from +x). Empty bins hold 0.
struct ScanContext {
  ScParams params;
  DescriptorMatrix values;

  friend bool operator==(const ScanContext& a, const ScanContext& b) {
    return a.params == b.params && a.values == b.values;
  }
};

ScanContext encode(const PointCloud& sensor_cloud, const ScParams& params);

/// Per-ring fraction of non-empty bins; invariant under column rotation.
RingKey ring_key(const ScanContext& sc);

/// Columns rotated so that result column (j + shift) mod N_s equals input column j.
ScanContext circshift(const ScanContext& sc, int shift);

struct ShiftMatch {
  double distance = 1.0;
  int shift = 0;
};

/// Column-cosine distance minimized over circular shifts of the candidate.
/// Shift n compares query column j with candidate column (j + n) mod N_s.
ShiftMatch sc_distance(const ScanContext& query, const ScanContext& candidate);

/// Heading of the query sensor relative to the candidate, in (-pi, pi].
double shift_to_yaw(int shift, int n_sectors);

struct DatabaseEntry {
  Point3 position;
  ScanContext descriptor;
  RingKey key;
};

struct DescriptorDatabase {
  ScParams params;
  SensorModel sensor;
  double resolution = 0.0;
  std::vector<DatabaseEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Synthesize -> sensor frame -> encode at every sample, in sample order.
/// Work is spread over threads (threads <= 0 uses hardware concurrency).
DescriptorDatabase build_database(const OccupancyGrid& grid, const CandidateSet& samples,
                                  const SensorModel& sensor, const ScParams& params, int threads = 0);

/// Descriptor for one database position (the chain build_database runs per sample).
ScanContext descriptor_at(const OccupancyGrid& grid, const Point3& p, const SensorModel& sensor,
                          const ScParams& params);

struct RetrievalCandidate {
  std::size_t index = 0;
  Point3 position = Point3::Zero();
  double yaw = 0.0;
  double distance = 0.0;
  int shift = 0;
};

int default_prefilter(int k_c);

/// Ring-key prefilter (exact Euclidean top-`prefilter`), then shift-distance
/// ranking; ascending distance, ties by smallest index.
std::vector<RetrievalCandidate> query(const DescriptorDatabase& db, const ScanContext& q, int k_c,
                                      int prefilter);

}  // namespace reloc
