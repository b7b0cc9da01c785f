#include "crplan/baselines.hpp"
#include "crplan/kinematics.hpp"
#include "crplan/scenario.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace crplan {
namespace {

std::vector<Vec3> line_path(const Config& q, const ManipulatorParams& params, const Vec3& dir,
                            int n) {
  std::vector<Vec3> path;
  const Vec3 start = end_effector(q, params);
  for (int i = 0; i < n; ++i) path.push_back(start + i * dir);
  return path;
}

TEST(RandomNullspace, ZeroBiasMatchesPlainTracking) {
  const ManipulatorParams params;
  const Config q{0.5, 0.4, 0.7, 1.5};
  const auto path = line_path(q, params, Vec3(0.8, -0.4, -0.2), 30);
  RandomNullspaceOptions opts;
  opts.mu_max = 0.0;
  const auto r = random_nullspace_planner(path, q, {}, params, 9, opts);
  PlannerOptions plain;
  plain.avoidance = false;
  const Trajectory t = plan_motion(path, q, {}, AvoidanceGains{}, params, plain);
  ASSERT_TRUE(r.outcome.succeeded);
  ASSERT_EQ(r.trajectory.steps.size(), t.steps.size());
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    EXPECT_EQ(r.trajectory.steps[i].config, t.steps[i].config);
  }
}

TEST(RandomNullspace, ObstacleFreeSucceeds) {
  const ManipulatorParams params;
  const Config q{0.5, 0.4, 0.7, 1.5};
  const auto path = line_path(q, params, Vec3(0.8, -0.4, -0.2), 30);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = random_nullspace_planner(path, q, {}, params, seed);
    EXPECT_TRUE(r.outcome.succeeded);
    EXPECT_EQ(r.outcome.steps_taken, 29u);
    EXPECT_EQ(r.outcome.failure_reason, FailureReason::None);
    EXPECT_LT(r.trajectory.max_tracking_error(), 0.2);
  }
}

TEST(RandomNullspace, SuccessfulRunsAreCollisionFree) {
  Scenario s = load_scenario(test::scenario_path("env2"));
  s.planner = PlannerKind::RandomNullspace;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    s.rng_seed = seed;
    const RunReport r = run_scenario(s);
    if (!r.outcome.succeeded) {
      EXPECT_EQ(r.outcome.failure_reason, FailureReason::Stalled);
      continue;
    }
    EXPECT_GT(r.trajectory.min_clearance(), 0.0);
  }
}

TEST(RandomNullspace, StallsWhenEveryDrawCollides) {
  const ManipulatorParams params;
  const Config q{0.5, 0.4, 0.7, 1.5};
  const FrameChain chain = forward_kinematics(q, params);
  const Vec3 axis = (chain.joint_points[4] - chain.joint_points[3]).normalized();
  const auto path = line_path(q, params, 2.0 * axis, 10);
  // An obstacle straight ahead of the gripper sits on the path.
  const std::vector<SphereObstacle> obs{{path[0] + 14.0 * axis, 4.0}};
  ASSERT_TRUE(config_collision_free(q, params, obs));
  const auto r = random_nullspace_planner(path, q, obs, params, 3);
  EXPECT_FALSE(r.outcome.succeeded);
  EXPECT_EQ(r.outcome.failure_reason, FailureReason::Stalled);
  EXPECT_GT(r.trajectory.min_clearance(), 0.0);
}

TEST(RandomNullspace, DeterministicPerSeed) {
  Scenario s = load_scenario(test::scenario_path("env2"));
  s.planner = PlannerKind::RandomNullspace;
  s.rng_seed = 4;
  const RunReport a = run_scenario(s);
  const RunReport b = run_scenario(s);
  ASSERT_EQ(a.trajectory.steps.size(), b.trajectory.steps.size());
  for (std::size_t i = 0; i < a.trajectory.steps.size(); ++i) {
    EXPECT_EQ(a.trajectory.steps[i].config, b.trajectory.steps[i].config);
  }
}

TEST(ConfigDistance, WristWraps) {
  EXPECT_NEAR(config_distance({0, 0.1, 0, 0}, {0, kTwoPi - 0.1, 0, 0}), 0.2, 1e-12);
  EXPECT_NEAR(config_distance({0.5, 0, 1, 0}, {0.2, 0, 1.4, 0}), 0.5, 1e-12);
}

TEST(ConfigEdge, DetectsCollisionInside) {
  const ManipulatorParams params;
  const Config a{0.0, 0.0, 0.0, 0.0};
  const Config b{1.6, 0.0, 0.0, 0.0};
  const Vec3 mid = end_effector({0.8, 0.0, 0.0, 0.0}, params);
  const std::vector<SphereObstacle> obs{{mid, 2.0}};
  ASSERT_TRUE(config_collision_free(a, params, obs));
  ASSERT_TRUE(config_collision_free(b, params, obs));
  EXPECT_FALSE(config_edge_free(a, b, obs, params, 0.05));
  EXPECT_TRUE(config_edge_free(a, b, {}, params, 0.05));
}

TEST(CspaceRrtStar, GoalAtStartIsImmediate) {
  const ManipulatorParams params;
  const Config q{0.5, 0.4, 0.7, 1.5};
  const auto r = cspace_rrt_star(q, end_effector(q, params), {}, params, 1000, 1);
  EXPECT_TRUE(r.outcome.succeeded);
  ASSERT_EQ(r.path.size(), 1u);
  EXPECT_EQ(r.path[0], q.canonical());
}

TEST(CspaceRrtStar, ObstacleFreeSucceeds) {
  const ManipulatorParams params;
  const Config q{0.5, 0.4, 0.7, 1.5};
  const Vec3 goal = end_effector({1.2, 3.0, 0.4, 0.5}, params);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = cspace_rrt_star(q, goal, {}, params, 50000, seed);
    ASSERT_TRUE(r.outcome.succeeded) << "seed " << seed;
    EXPECT_LT((end_effector(r.path.back(), params) - goal).norm(), 5.0);
    for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
      EXPECT_LE(config_distance(r.path[i], r.path[i + 1]), 0.6 + 1e-9);
    }
  }
}

TEST(CspaceRrtStar, Env1PathIsCollisionFree) {
  const Scenario s = load_scenario(test::scenario_path("env1"));
  const Vec3 goal = std::get<SrrtPath>(s.path_source).goal;
  const auto r = cspace_rrt_star(s.q_init, goal, s.obstacles, s.manipulator, 200000, 2);
  ASSERT_TRUE(r.outcome.succeeded);
  for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
    EXPECT_TRUE(config_edge_free(r.path[i], r.path[i + 1], s.obstacles, s.manipulator, 0.05));
  }
}

TEST(CspaceRrtStar, ExhaustedIterations) {
  const ManipulatorParams params;
  const auto r = cspace_rrt_star({0.5, 0.4, 0.7, 1.5}, Vec3(500, 0, 0), {}, params, 200, 1);
  EXPECT_FALSE(r.outcome.succeeded);
  EXPECT_EQ(r.outcome.failure_reason, FailureReason::IterationsExhausted);
}

TEST(FailureName, Names) {
  EXPECT_STREQ(failure_name(FailureReason::Stalled), "stalled");
  EXPECT_STREQ(failure_name(FailureReason::None), "none");
}

}  // namespace
}  // namespace crplan
