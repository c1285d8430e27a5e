#include "reloc/sampler.hpp"

#include "reloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace reloc {

std::vector<Vec3> SamplerConfig::observability_directions() const {
  return obs_dirs.empty() ? fibonacci_directions(32) : obs_dirs;
}

void SamplerConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(r_sep > 0.0)) fail("r_sep must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (t_s < 1 || t_s > t_e) fail("need 1 <= t_s <= t_e");
  if (n_hit < 1) fail("n_hit must be >= 1");
  if (step < 0.0) fail("step must be positive");
  if (window < 1) fail("window must be >= 1");
  if (r_uav < 0.0 || r_safe < 0.0) fail("clearance radii must be >= 0");
  if (!(obs_range > 0.0)) fail("observability range must be positive");
  for (const auto& d : obs_dirs)
    if (std::abs(d.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidDirection);
}

std::optional<double> StopState::mu_ref(int t_s, int t_e) const {
  if (static_cast<long>(window_counts.size()) < t_e) return std::nullopt;
  double sum = 0.0;
  for (int t = t_s; t <= t_e; ++t) sum += static_cast<double>(window_counts[t - 1]);
  return sum / static_cast<double>(t_e - t_s + 1);
}

std::vector<Vec3> fibonacci_directions(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "direction count must be >= 1");
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(Vec3(rho * std::cos(phi), rho * std::sin(phi), z).normalized());
  }
  return dirs;
}

bool separation_ok(const Point3& p, const CandidateSet& existing, double r_sep) {
  const double r2 = r_sep * r_sep;
  for (const auto& q : existing.positions)
    if ((p - q).squaredNorm() < r2) return false;
  return true;
}

int observability_hits(const OccupancyGrid& grid, const Point3& p, std::span<const Vec3> dirs,
                       double range) {
  if (dirs.empty()) throw Error(ErrorCode::InvalidArgument, "empty direction set");
  int hits = 0;
  for (const auto& d : dirs)
    if (raycast_first_return(grid, p, d, range)) ++hits;
  return hits;
}

bool should_stop(const StopState& state, const SamplerConfig& cfg) {
  const long t = static_cast<long>(state.window_counts.size());
  if (t <= cfg.t_e) return false;
  const double mu = *state.mu_ref(cfg.t_s, cfg.t_e);
  return static_cast<double>(state.window_counts.back()) < cfg.alpha * mu;
}

// ---------------------------------------------------------------------------

SpatialHash::SpatialHash(double cell) : cell_(cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "hash cell must be positive");
}

std::array<long, 3> SpatialHash::cell_of(const Point3& p) const {
  return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_)),
          static_cast<long>(std::floor(p.z() / cell_))};
}

SpatialHash::Key SpatialHash::key(long x, long y, long z) {
  auto u = [](long v) { return static_cast<std::uint64_t>(v + (1 << 20)) & 0x1FFFFF; };
  return (u(x) << 42) | (u(y) << 21) | u(z);
}

void SpatialHash::insert(const Point3& p, int index) {
  const auto c = cell_of(p);
  if (points_.empty()) {
    lo_ = hi_ = c;
  } else {
    for (int a = 0; a < 3; ++a) {
      lo_[a] = std::min(lo_[a], c[a]);
      hi_[a] = std::max(hi_[a], c[a]);
    }
  }
  if (index != static_cast<int>(points_.size()))
    throw Error(ErrorCode::InvalidArgument, "spatial hash indices must be dense");
  points_.push_back(p);
  buckets_[key(c[0], c[1], c[2])].push_back(index);
}

int SpatialHash::nearest(const Point3& p) const {
  if (points_.empty()) return -1;

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  auto consider = [&](int i) {
    const double d2 = (points_[i] - p).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
      best_d2 = d2;
      best = i;
    }
  };

  if (points_.size() <= 256) {
    for (int i = 0; i < static_cast<int>(points_.size()); ++i) consider(i);
    return best;
  }

  // Expanding Chebyshev shells of cells. Points in shell k+1 or beyond are at
  // least k * cell away, so the search can stop once best <= k * cell.
  const auto c = cell_of(p);
  long max_shell = 0;
  for (int a = 0; a < 3; ++a) max_shell = std::max({max_shell, std::abs(c[a] - lo_[a]), std::abs(hi_[a] - c[a])});

  for (long k = 0; k <= max_shell; ++k) {
    for (long dz = -k; dz <= k; ++dz) {
      for (long dy = -k; dy <= k; ++dy) {
        const bool face = std::abs(dz) == k || std::abs(dy) == k;
        for (long dx = -k; dx <= k; dx += (face ? 1 : 2 * k)) {
          auto it = buckets_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it != buckets_.end())
            for (int i : it->second) consider(i);
          if (k == 0) break;
        }
      }
    }
    const double reach = static_cast<double>(k) * cell_;
    if (best >= 0 && best_d2 <= reach * reach) break;
  }
  return best;
}

bool SpatialHash::any_within(const Point3& p, double radius) const {
  const double r2 = radius * radius;
  const long reach = static_cast<long>(std::ceil(radius / cell_));
  const auto c = cell_of(p);
  for (long dz = -reach; dz <= reach; ++dz)
    for (long dy = -reach; dy <= reach; ++dy)
      for (long dx = -reach; dx <= reach; ++dx) {
        auto it = buckets_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
        if (it == buckets_.end()) continue;
        for (int i : it->second)
          if ((points_[i] - p).squaredNorm() < r2) return true;
      }
  return false;
}

// ---------------------------------------------------------------------------

namespace {

class Acceptor {
 public:
  Acceptor(const OccupancyGrid& grid, const SamplerConfig& cfg)
      : grid_(grid), cfg_(cfg), dirs_(cfg.observability_directions()) {}

  /// Clearance and observability (the separation test needs the sample set).
  bool feasible(const Point3& p) const {
    if (grid_.occupied(grid_.voxel_of(p))) return false;
    if (!clearance_ok(grid_, p, cfg_.r_clr())) return false;
    return observability_hits(grid_, p, dirs_, cfg_.obs_range) >= cfg_.n_hit;
  }

 private:
  const OccupancyGrid& grid_;
  const SamplerConfig& cfg_;
  std::vector<Vec3> dirs_;
};

}  // namespace

SamplingResult sample_candidates(const OccupancyGrid& grid, const SamplerConfig& cfg) {
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  const Point3 lo = grid.origin();
  const Point3 hi = grid.max_corner();
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()), uz(lo.z(), hi.z());
  auto draw = [&] { return Point3(ux(rng), uy(rng), uz(rng)); };

  const Acceptor acceptor(grid, cfg);
  SamplingResult result;
  CandidateSet& set = result.samples;
  SpatialHash hash(cfg.r_sep);

  const long root_budget = 10 * cfg.window;
  for (long attempt = 0; attempt < root_budget; ++attempt) {
    const Point3 p = draw();
    if (acceptor.feasible(p)) {
      set.positions.push_back(p);
      set.parents.push_back(-1);
      hash.insert(p, 0);
      break;
    }
  }
  if (set.empty()) throw Error(ErrorCode::NoFeasibleRegion);

  const double steer = cfg.steer_length();
  const long cap = cfg.iteration_cap();
  long in_window = 0;
  long accepted_in_window = 0;

  while (result.iterations < cap) {
    const Point3 target = draw();
    const int near = hash.nearest(target);
    const Vec3 delta = target - set.positions[near];
    const double dist = delta.norm();
    ++result.iterations;

    if (dist > 0.0) {
      const Point3 p_new = set.positions[near] + delta * (std::min(steer, dist) / dist);
      // Cheapest test first; the outcome equals evaluating all three.
      if (!hash.any_within(p_new, cfg.r_sep) && acceptor.feasible(p_new)) {
        const int index = static_cast<int>(set.size());
        set.positions.push_back(p_new);
        set.parents.push_back(near);
        hash.insert(p_new, index);
        ++accepted_in_window;
      }
    }

    if (++in_window == cfg.window) {
      result.stop_state.window_counts.push_back(accepted_in_window);
      in_window = 0;
      accepted_in_window = 0;
      if (should_stop(result.stop_state, cfg)) {
        result.stopped_early = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace reloc
