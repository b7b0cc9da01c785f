#pragma once

#include "crplan/jacobian.hpp"
#include "crplan/proximity.hpp"
#include "crplan/types.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace crplan {

/// Distance thresholds (r > r_max > r_min > 0, mm) and escape speed k
/// (mm per step) of the null-space avoidance term.
struct AvoidanceGains {
  double r = 28.0;
  double r_max = 25.0;
  double r_min = 22.0;
  double k = 6.0;

  void validate() const;
};

/// Null-space term gate: 1 inside r_max, 0 beyond r, cosine blend between.
double gain_h(double d, const AvoidanceGains& gains);

/// Escape-velocity gate: 1 inside r_min, 0 beyond r_max, quadratic between.
double gain_v(double d, const AvoidanceGains& gains);

/// Task velocity with the previous step's tracking error folded back in.
Vec3 corrected_task_velocity(const Vec3& p_expected_old, const Vec3& p_actual_old,
                             const Vec3& p_dot);

/// Velocity of magnitude k pushing the closest point away from the obstacle
/// center. Throws std::domain_error when the two points coincide.
Vec3 escape_velocity(const Vec3& closest, const Vec3& obstacle_center, double k);

/// Raised when the weighted task Jacobian has no usable singular value.
class SingularTaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IikStep {
  Vec4 tracking_term = Vec4::Zero();   // W^-1/2 J_we^+ p_f
  Vec4 null_space_term = Vec4::Zero();  // avoidance or random-bias term
  Config raw;                           // q_old + both terms, unclamped
  Config config;                        // raw with theta clamped, delta wrapped
};

/// Weighted IIK update with an optional arbitrary null-space vector mu:
///   q_new = q_old + W^-1/2 J_we^+ p_f + (I - J_e^+ J_e) mu
IikStep iik_step_biased(const Config& q_old, const Vec3& p_f, const Vec4& mu,
                        const Mat4& weights, const ManipulatorParams& params);

/// mu = 0 case of iik_step_biased.
IikStep iik_step_basic(const Config& q_old, const Vec3& p_f, const Mat4& weights,
                       const ManipulatorParams& params);

/// Tracking plus gated null-space avoidance of the closest point `prox`
/// from `obstacle`.
IikStep iik_step_avoid(const Config& q_old, const Vec3& p_f, const Vec3& p_e,
                       const ProximityResult& prox, const SphereObstacle& obstacle,
                       const AvoidanceGains& gains, const Mat4& weights,
                       const ManipulatorParams& params);

struct StepRecord {
  Config config;
  Vec3 ee_actual = Vec3::Zero();
  Vec3 ee_expected = Vec3::Zero();
  double tracking_error = 0.0;
  std::vector<double> clearances;  // one per obstacle, at `config`
  LinkId closest_link = LinkId::Rigid2;
  double closest_coord = 0.0;
  double g_h = 0.0;  // gains at the pre-step clearance
  double g_v = 0.0;
  bool avoidance_active = false;
  double pre_step_clearance = 0.0;
  // |J_e * avoidance term| for active steps [mm].
  double null_space_residual = 0.0;
  double solve_seconds = 0.0;

  double min_clearance() const;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<Vec3> path;
  bool colliding = false;

  double min_clearance() const;
  double max_tracking_error() const;
};

struct PlannerOptions {
  bool avoidance = true;
  bool drift_correction = true;
  // Closest points this far along the last rigid link count as the end
  // effector itself, where the avoidance subproblem is ill-posed.
  double end_effector_fraction = 0.95;
};

/// Builds the step record for configuration `q` tracking `expected`.
StepRecord make_step_record(const Config& q, const Vec3& expected,
                            std::span<const SphereObstacle> obstacles,
                            const ManipulatorParams& params);

bool closest_point_is_end_effector(const ProximityResult& prox,
                                   const ManipulatorParams& params,
                                   double end_effector_fraction);

/// Follows `path` with the end effector starting from q_init, activating
/// null-space avoidance on steps where the closest point would move toward
/// its obstacle. Steps that end in contact are recorded and flag the
/// trajectory as colliding.
Trajectory plan_motion(std::span<const Vec3> path, const Config& q_init,
                       std::span<const SphereObstacle> obstacles,
                       const AvoidanceGains& gains, const ManipulatorParams& params,
                       const PlannerOptions& options = {});

}  // namespace crplan
