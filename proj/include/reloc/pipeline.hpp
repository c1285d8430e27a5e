#pragma once

#include "reloc/descriptor.hpp"
#include "reloc/kdtree.hpp"
#include "reloc/registration.hpp"
#include "reloc/scansim.hpp"
#include "reloc/types.hpp"

#include <span>
#include <vector>

namespace reloc {

struct PipelineConfig {
  int k_f = 10;
  int k_c = 5;
  double tau = 0.3;
  double grid_resolution = 0.2;
  int prefilter = 0;  // <= 0 -> default_prefilter(k_c)
  SensorModel sensor;
  ScParams sc;
  IcpConfig icp;
  double query_voxel = 0.2;
  double map_voxel = 0.4;
  double default_roll = 0.0;
  double default_pitch = 0.0;

  int prefilter_size() const { return prefilter > 0 ? prefilter : default_prefilter(k_c); }
  void validate() const;
};

enum class Status { Accepted, Failed };

const char* to_string(Status s);

/// Wall time per online stage, seconds.
struct StageTimings {
  double accumulate = 0.0;
  double encode = 0.0;  // local grid, virtual scan and descriptor
  double retrieve = 0.0;
  double downsample = 0.0;
  std::vector<double> icp;  // one per refined candidate
  double total = 0.0;
};

struct CandidateAttempt {
  RetrievalCandidate candidate;
  RegistrationResult registration;
};

struct RelocalizationOutcome {
  Status status = Status::Failed;
  RigidTransform pose;  // valid when Accepted
  int candidate_rank_used = 0;  // 1-based; 0 when Failed
  double rmse = kRmseSentinel;
  std::vector<CandidateAttempt> attempts;
  StageTimings timings;
};

/// Concatenates the most recent k_f scans (the back of the list is the latest).
PointCloud accumulate_scans(std::span<const PointCloud> scans, int k_f);

/// Sensor-centred local occupancy grid of the accumulated cloud. The sensor sits at
/// a voxel center; that voxel and its 26 neighbors are forced free.
OccupancyGrid local_query_grid(const PointCloud& accumulated, double resolution, double extent);

/// Voxelize, ray cast from the origin with the database sensor model (R0 = I), encode.
ScanContext make_query_descriptor(const PointCloud& accumulated, const PipelineConfig& cfg);

/// Initial hypothesis [Rz(yaw) Ry(pitch) Rx(roll) | p].
RigidTransform initial_hypothesis(const RetrievalCandidate& c, double roll, double pitch);

/// Online matcher holding the database and the downsampled map index.
class Relocalizer {
 public:
  Relocalizer(const DescriptorDatabase& db, const PointCloud& global_map, const PipelineConfig& cfg);

  RelocalizationOutcome run(std::span<const PointCloud> scans) const;

  const KdTree& map_index() const { return map_index_; }
  double map_downsample_seconds() const { return map_seconds_; }

 private:
  const DescriptorDatabase& db_;
  PipelineConfig cfg_;
  KdTree map_index_;
  double map_seconds_ = 0.0;
};

/// Full online stage: downsamples the map, then runs the matcher once.
RelocalizationOutcome relocalize(const DescriptorDatabase& db, const PointCloud& global_map,
                                 std::span<const PointCloud> scans, const PipelineConfig& cfg);

}  // namespace reloc
