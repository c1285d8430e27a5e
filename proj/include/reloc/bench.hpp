#pragma once

#include "reloc/descriptor.hpp"
#include "reloc/grid.hpp"
#include "reloc/pipeline.hpp"
#include "reloc/sampler.hpp"
#include "reloc/scansim.hpp"
#include "reloc/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace reloc {

/// Axis-aligned solid. A ramp is the wedge under a plane rising from min.z at the
/// low end of `axis` (0 = x, 1 = y) to max.z at the high end.
struct Primitive {
  enum class Kind { Wall, Box, Ramp };
  Kind kind = Kind::Box;
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();
  int axis = 0;

  bool contains(const Point3& p) const;
};

/// Randomly placed boxes standing on base_z.
struct ClutterSpec {
  int count = 0;
  Vec3 min_size = Vec3(0.5, 0.5, 0.5);
  Vec3 max_size = Vec3(2.0, 2.0, 2.0);
  double base_z = 0.0;
  double margin = 1.0;  // keep-out band along the extent's x/y borders
};

struct WorldSpec {
  std::string name;
  Vec3 extent = Vec3(10.0, 10.0, 5.0);
  std::vector<Primitive> primitives;
  ClutterSpec clutter;
  std::uint64_t seed = 1;
};

/// Fixed primitives plus the seeded clutter boxes.
std::vector<Primitive> expand_primitives(const WorldSpec& spec);

/// Grid over [0, extent]; a voxel is occupied iff its center lies in some primitive.
OccupancyGrid generate_world(const WorldSpec& spec, double resolution);

WorldSpec corridor_world();
WorldSpec slope_world();

/// Where a simulated return lands on the first occupied voxel.
enum class ReturnModel {
  VoxelCenter,  // same points as synthesize_scan
  SurfaceHit,   // exact entry point of the ray into the voxel
};

/// k_f ray-cast frames from the posed sensor in its own frame, each with independent
/// N(0, sigma^2) noise per axis.
std::vector<PointCloud> simulate_observation(const OccupancyGrid& grid, const RigidTransform& pose,
                                             const SensorModel& model, int k_f, double noise_sigma,
                                             std::uint64_t seed,
                                             ReturnModel returns = ReturnModel::VoxelCenter);

/// Dense map cloud: per_edge x per_edge points on every occupied-voxel face that
/// borders free space (voxels outside the grid count as occupied).
PointCloud surface_samples(const OccupancyGrid& grid, int per_edge = 2);

/// Uniform random positions that pass the sampler's clearance and observability
/// tests, with yaw uniform in (-pi, pi] and zero roll/pitch.
std::vector<RigidTransform> draw_feasible_poses(const OccupancyGrid& grid, const SamplerConfig& cfg, int count,
                                                std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

inline constexpr double kSuccessMaxPositionError = 4.0;  // m
inline constexpr double kSuccessMaxYawErrorDeg = 20.0;

struct TrialRecord {
  int pose_index = 0;
  int trial_index = 0;
  RigidTransform ground_truth;
  Status status = Status::Failed;
  RigidTransform estimate;
  int candidate_rank_used = 0;
  double rmse = kRmseSentinel;
  double d_err = kRmseSentinel;    // m; +inf when no pose was produced
  double psi_err = kRmseSentinel;  // degrees
  double elapsed = 0.0;            // s
  double retrieve_time = 0.0;      // s
  bool success = false;
  std::string failure_reason;
};

struct EvalSummary {
  int trials = 0;
  int accepted = 0;
  int successes = 0;
  double sr = 0.0;     // percent
  double e_p = 0.0;    // m, mean over successful trials
  double e_psi = 0.0;  // degrees, mean over successful trials
  double t_bar = 0.0;  // s, mean over all trials
};

struct EvalReport {
  EvalSummary summary;
  std::vector<TrialRecord> trials;
};

/// Fills d_err / psi_err / success of a record from its estimate.
void score_trial(TrialRecord& rec);

EvalSummary summarize(const std::vector<TrialRecord>& trials);

struct EvalOptions {
  int trials_per_pose = 20;
  double noise_sigma = 0.0;
  std::uint64_t master_seed = 7;
  ReturnModel returns = ReturnModel::SurfaceHit;
};

EvalReport evaluate(const DescriptorDatabase& db, const PointCloud& map_cloud, const OccupancyGrid& world,
                    const std::vector<RigidTransform>& poses, const PipelineConfig& cfg,
                    const EvalOptions& options);

std::string report_to_json(const EvalReport& report);
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials);

/// Ground-truth pose list, one "x y z yaw" per line (yaw in radians), '#' comments.
void write_poses(std::ostream& os, const std::vector<RigidTransform>& poses);
std::vector<RigidTransform> read_poses(std::istream& is);

WorldSpec world_from_json(const std::string& text);
std::string world_to_json(const WorldSpec& spec);

}  // namespace reloc
