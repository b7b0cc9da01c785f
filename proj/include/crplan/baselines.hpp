#pragma once

#include "crplan/iik_planner.hpp"
#include "crplan/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace crplan {

enum class FailureReason { None, Stalled, Collision, IterationsExhausted };

const char* failure_name(FailureReason r);

struct BaselineOutcome {
  bool succeeded = true;
  std::size_t steps_taken = 0;
  double wall_time = 0.0;  // [s]
  FailureReason failure_reason = FailureReason::None;

  static BaselineOutcome failure(FailureReason reason, std::size_t steps, double seconds) {
    return {false, steps, seconds, reason};
  }
};

struct RandomNullspaceOptions {
  double mu_max = 0.05;          // componentwise bound of the random bias [rad]
  std::size_t stall_limit = 100;  // redraws before a step is declared stuck
};

struct RandomNullspaceResult {
  Trajectory trajectory;
  BaselineOutcome outcome;
};

/// IIK tracking where the null-space vector is a small uniform random draw,
/// redrawn while the resulting configuration collides. Stops with `Stalled`
/// once every redraw of a step collides.
RandomNullspaceResult random_nullspace_planner(std::span<const Vec3> path, const Config& q_init,
                                               std::span<const SphereObstacle> obstacles,
                                               const ManipulatorParams& params,
                                               std::uint64_t seed,
                                               const RandomNullspaceOptions& options = {});

struct CspaceRrtOptions {
  double step = 0.3;               // steer distance in joint space [rad]
  double edge_resolution = 0.05;   // max per-coordinate gap between checked configs [rad]
  double goal_tolerance = 5.0;     // end effector distance to the goal [mm]
  double rewire_cap = 0.6;         // [rad]
};

struct CspaceRrtResult {
  std::vector<Config> path;
  BaselineOutcome outcome;
  std::size_t tree_size = 0;
};

/// Distance on [0, pi] x S^1 x [0, pi] x S^1; wrist angles wrap.
double config_distance(const Config& a, const Config& b);

/// Collision check of the straight joint-space edge a -> b, sampled so no
/// coordinate jumps more than `resolution` between checked configurations.
bool config_edge_free(const Config& a, const Config& b, std::span<const SphereObstacle> obstacles,
                      const ManipulatorParams& params, double resolution);

/// RRT* directly over the joint space until a configuration puts the end
/// effector within goal_tolerance of goal_position.
CspaceRrtResult cspace_rrt_star(const Config& q_init, const Vec3& goal_position,
                                std::span<const SphereObstacle> obstacles,
                                const ManipulatorParams& params, std::size_t max_iters,
                                std::uint64_t seed, const CspaceRrtOptions& options = {});

}  // namespace crplan
