#pragma once

#include "crplan/baselines.hpp"
#include "crplan/iik_planner.hpp"
#include "crplan/srrt.hpp"
#include "crplan/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace crplan {

/// Horizontal circle (normal +z) traversed once counterclockwise, starting at
/// the point nearest the initial end effector.
struct FixedCirclePath {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::size_t n_points = 121;
};

struct SrrtPath {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  SearchSpace space;
  std::size_t max_iters = 20000;
  std::size_t n_samples = 30;
  // Extra clearance for the end-effector path beyond the body radius [mm].
  double margin = 0.0;
};

using PathSource = std::variant<FixedCirclePath, SrrtPath>;

enum class PlannerKind { Avoidance, NoAvoidance, RandomNullspace, CspaceRrtStar };

const char* planner_name(PlannerKind kind);
std::optional<PlannerKind> parse_planner(const std::string& name);

struct Scenario {
  std::string name;
  ManipulatorParams manipulator;
  Config q_init;
  PathSource path_source;
  std::vector<SphereObstacle> obstacles;
  AvoidanceGains gains;
  PlannerKind planner = PlannerKind::Avoidance;
  std::uint64_t rng_seed = 1;
  RandomNullspaceOptions random_nullspace;
  CspaceRrtOptions cspace;
  std::size_t cspace_max_iters = 200000;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
};

/// Malformed file: bad syntax, wrong type, unknown key. Carries line info.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed file whose values break an invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses an angle: a plain number, or a multiple of pi such as "pi/9",
/// "2*pi/5", "-pi". Returns empty for anything else.
std::optional<double> parse_angle(const std::string& text);

Scenario parse_scenario(const std::string& text, const std::string& source_name = "<string>");
Scenario load_scenario(const std::filesystem::path& file);

struct RunTimings {
  double path_planning = 0.0;    // [s]
  double motion_planning = 0.0;  // [s]
  double total() const { return path_planning + motion_planning; }
};

struct RunReport {
  std::string scenario_name;
  PlannerKind planner = PlannerKind::Avoidance;
  std::uint64_t seed = 0;
  Trajectory trajectory;
  BaselineOutcome outcome;
  RunTimings timings;
  std::size_t obstacle_count = 0;
  std::size_t path_points = 0;
  // Intermediate S-RRT* stages when the path came from the workspace search.
  std::optional<SrrtResult> srrt;
};

/// Circle samples for a fixed-circle scenario.
std::vector<Vec3> fixed_circle_path(const FixedCirclePath& circle, const Vec3& initial_ee);

/// Builds the end-effector path, runs the selected planner and times both
/// phases. Planner failures are reported through `outcome`, not thrown.
RunReport run_scenario(const Scenario& s);

}  // namespace crplan
