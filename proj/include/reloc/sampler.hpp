#pragma once

#include "reloc/grid.hpp"
#include "reloc/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace reloc {

struct SamplerConfig {
  double r_uav = 0.4;
  double r_safe = 0.3;
  double r_sep = 1.2;
  std::vector<Vec3> obs_dirs;  // empty -> 32-direction Fibonacci lattice
  double obs_range = 50.0;
  int n_hit = 2;
  double step = 0.0;  // RRT steer length; <= 0 -> 2 * r_sep
  long window = 10000;
  int t_s = 5;
  int t_e = 10;
  double alpha = 0.4;
  long max_iters = 0;  // <= 0 -> 50 * window
  std::uint64_t seed = 1;

  double r_clr() const { return r_uav + r_safe; }
  double steer_length() const { return step > 0.0 ? step : 2.0 * r_sep; }
  long iteration_cap() const { return max_iters > 0 ? max_iters : 50 * window; }
  std::vector<Vec3> observability_directions() const;

  /// Throws InvalidArgument on violated invariants.
  void validate() const;
};

struct CandidateSet {
  std::vector<Point3> positions;
  std::vector<int> parents;  // -1 for the root

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
};

/// Accepted-sample counts per completed window; window t (1-based) is counts[t - 1].
struct StopState {
  std::vector<long> window_counts;

  /// Mean count over windows [t_s, t_e]; defined once t_e windows are complete.
  std::optional<double> mu_ref(int t_s, int t_e) const;
};

struct SamplingResult {
  CandidateSet samples;
  long iterations = 0;
  bool stopped_early = false;
  StopState stop_state;
};

/// Deterministic spherical Fibonacci lattice of n unit vectors.
std::vector<Vec3> fibonacci_directions(int n);

bool separation_ok(const Point3& p, const CandidateSet& existing, double r_sep);

int observability_hits(const OccupancyGrid& grid, const Point3& p, std::span<const Vec3> dirs,
                       double range);

bool should_stop(const StopState& state, const SamplerConfig& cfg);

/// Goal-free RRT growth over the free space of the grid. A steered point joins the
/// tree only if it passes clearance, separation and observability; iterations are
/// grouped into windows for yield-based early stopping.
SamplingResult sample_candidates(const OccupancyGrid& grid, const SamplerConfig& cfg);

/// Uniform hash over accepted positions with cell size equal to r_sep.
class SpatialHash {
 public:
  explicit SpatialHash(double cell);

  void insert(const Point3& p, int index);
  std::size_t size() const { return points_.size(); }

  /// Index of the exact nearest stored point (smallest index on ties); -1 if empty.
  int nearest(const Point3& p) const;

  /// True iff some stored point lies strictly closer than radius (radius <= cell).
  bool any_within(const Point3& p, double radius) const;

 private:
  using Key = std::uint64_t;
  std::array<long, 3> cell_of(const Point3& p) const;
  static Key key(long x, long y, long z);

  double cell_;
  std::vector<Point3> points_;
  std::unordered_map<Key, std::vector<int>> buckets_;
  std::array<long, 3> lo_{0, 0, 0}, hi_{0, 0, 0};
};

}  // namespace reloc
