#pragma once

#include <Eigen/Dense>

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crplan {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat43 = Eigen::Matrix<double, 4, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);

/// Joint coordinates (theta1, delta1, theta2, delta2): bend and wrist angles
/// of the two continuum segments, in radians.
struct Config {
  double theta1 = 0.0;
  double delta1 = 0.0;
  double theta2 = 0.0;
  double delta2 = 0.0;

  Vec4 vec() const { return {theta1, delta1, theta2, delta2}; }
  static Config from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

  double theta(int segment) const { return segment == 1 ? theta1 : theta2; }
  double delta(int segment) const { return segment == 1 ? delta1 : delta2; }

  /// Bend angles clamped to [0, pi], wrist angles wrapped to [0, 2*pi).
  Config canonical() const;

  bool operator==(const Config&) const = default;
};

struct JointRange {
  double lo = 0.0;
  double hi = 0.0;
};

enum class JacobianMode { Analytic, FiniteDifference };

struct ManipulatorParams {
  double spring_length = 24.0;       // L_s [mm]
  double rigid_length1 = 28.55879;   // L_g1 [mm]
  double rigid_length2 = 39.12135;   // L_g2 [mm]
  double body_radius = 5.0;          // [mm]
  double straight_threshold = 1e-6;  // below this bend angle a segment is straight [rad]
  // Ranges seen by the joint-limit weighting. A negative bend is stored
  // reflected into [0, pi], so only |theta| = pi is a real limit.
  std::array<JointRange, 4> joint_limits{
      {{-kPi, kPi}, {0.0, kTwoPi}, {-kPi, kPi}, {0.0, kTwoPi}}};

  // Singular values below pinv_tolerance * sigma_max are dropped.
  double pinv_tolerance = 1e-8;
  // Damped least squares kicks in when sigma_min of the weighted task
  // Jacobian falls below this absolute value [mm/rad].
  double dls_threshold = 1e-2;
  // Same rule for the rank-one closest-point avoidance subproblem [mm/rad].
  double avoidance_dls_threshold = 20.0;
  JacobianMode jacobian_mode = JacobianMode::Analytic;

  double rigid_length(int segment) const {
    return segment == 1 ? rigid_length1 : rigid_length2;
  }

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

enum class LinkId { Continuum1 = 0, Rigid1 = 1, Continuum2 = 2, Rigid2 = 3 };

const char* link_name(LinkId id);
inline int segment_of(LinkId id) { return static_cast<int>(id) / 2 + 1; }
inline bool is_continuum(LinkId id) {
  return id == LinkId::Continuum1 || id == LinkId::Continuum2;
}

struct SphereObstacle {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

}  // namespace crplan
