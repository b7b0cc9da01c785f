#pragma once

#include "crplan/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace crplan {

/// Axis-aligned search box [mm].
struct SearchSpace {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  void validate() const;
  bool contains(const Vec3& p) const;
  double volume() const { return (max - min).prod(); }
};

struct TreeNode {
  Vec3 position;
  std::optional<std::size_t> parent;
  double cost = 0.0;  // path length from the root
};

using WorkspacePath = std::vector<Vec3>;

double path_length(std::span<const Vec3> path);

/// True iff the closed segment a-b stays more than `clearance` away from
/// every obstacle surface. Exact point-segment distance, no sampling.
bool segment_collision_free(const Vec3& a, const Vec3& b,
                            std::span<const SphereObstacle> obstacles, double clearance);

bool point_collision_free(const Vec3& p, std::span<const SphereObstacle> obstacles,
                          double clearance);

bool path_collision_free(std::span<const Vec3> path, std::span<const SphereObstacle> obstacles,
                         double clearance);

class NoPathFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RrtOptions {
  double goal_bias = 0.05;
  double step_length = 10.0;  // steer distance [mm]
  double goal_radius = 5.0;   // [mm]
  double rewire_cap = 30.0;   // upper bound on the shrinking-ball radius [mm]
  // Keep sampling this many iterations after the goal joins the tree, to let
  // rewiring shorten the solution. 0 stops at the first connection.
  std::size_t refine_iterations = 0;
};

struct RrtResult {
  WorkspacePath path;
  std::vector<TreeNode> tree;
  std::size_t iterations = 0;
};

/// RRT* from start to goal inside `space`, treating each obstacle as
/// inflated by `clearance`. Deterministic for a given seed. Throws
/// NoPathFound when max_iters pass without reaching the goal region, and
/// std::invalid_argument when start or goal is in collision or outside the
/// box.
RrtResult rrt_star(const Vec3& start, const Vec3& goal,
                   std::span<const SphereObstacle> obstacles, const SearchSpace& space,
                   std::size_t max_iters, std::uint64_t seed, double clearance,
                   const RrtOptions& options = {});

/// Forward-greedy shortcutting: from each anchor jump to the farthest later
/// waypoint visible along a collision-free straight segment.
WorkspacePath prune_path(std::span<const Vec3> path, std::span<const SphereObstacle> obstacles,
                         double clearance);

/// Point of the clamped uniform B-spline of degree min(3, n - 1) over the
/// control points, at parameter u in [0, 1].
Vec3 bspline_point(std::span<const Vec3> control, double u);

/// Clamped cubic B-spline through the control polygon `waypoints`, sampled at
/// n_samples uniform parameter values. If a sampled chord collides, the
/// control polygon is densified toward the polyline; as a last resort the
/// polyline itself is resampled with every vertex kept.
WorkspacePath bspline_smooth(std::span<const Vec3> waypoints, std::size_t n_samples,
                             std::span<const SphereObstacle> obstacles, double clearance);

struct SrrtResult {
  WorkspacePath raw;
  WorkspacePath pruned;
  WorkspacePath smoothed;
  std::size_t iterations = 0;
  std::size_t tree_size = 0;
};

/// RRT*, pruning, then B-spline smoothing to n_samples points.
SrrtResult srrt_plan(const Vec3& start, const Vec3& goal,
                     std::span<const SphereObstacle> obstacles, const SearchSpace& space,
                     std::size_t max_iters, std::size_t n_samples, std::uint64_t seed,
                     double clearance, const RrtOptions& options = {});

}  // namespace crplan
