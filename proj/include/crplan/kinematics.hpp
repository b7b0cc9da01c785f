#pragma once

#include "crplan/types.hpp"

#include <array>
#include <optional>

namespace crplan {

/// Elementary rotations about the z (wrist) and y (bend) axes.
Mat3 rot_z(double angle);
Mat3 rot_y(double angle);

/// Rotation across one continuum segment: Rz(delta) * Ry(theta) * Rz(-delta).
Mat3 segment_rotation(double theta, double delta);

/// Point at fraction `beta` of a segment's arc length, expressed in the
/// segment's bending plane (before the wrist rotation). For beta = 1 this is
/// the spring tip (L/theta) * [1 - cos(theta), 0, sin(theta)].
/// Evaluated through sinc-style forms so theta -> 0 is well conditioned.
Vec3 arc_point_local(double theta, double beta, double spring_length);

/// d/dtheta of arc_point_local at fixed beta.
Vec3 arc_point_local_dtheta(double theta, double beta, double spring_length);

/// Spring tip in its bending plane; below the straight threshold returns the
/// straight-segment limit [0, 0, L_s].
Vec3 spring_endpoint_local(double theta, const ManipulatorParams& params);

struct FrameChain {
  // P_r0, P_s1, P_r1, P_s2, P_r2
  std::array<Vec3, 5> joint_points;
  // Rotation across each continuum segment.
  std::array<Mat3, 2> segment_rotations;
  // Orientation at the base of each continuum segment (product of the
  // proximal segment rotations).
  std::array<Mat3, 2> base_rotations;
  // Arc centers; empty for straight segments.
  std::array<std::optional<Vec3>, 2> arc_centers;
  // Unit normals of each segment's bending plane.
  std::array<Vec3, 2> arc_normals;

  const Vec3& end_effector() const { return joint_points[4]; }
  const Vec3& segment_start(int segment) const { return joint_points[2 * (segment - 1)]; }
  const Vec3& spring_end(int segment) const { return joint_points[2 * segment - 1]; }
  const Vec3& rigid_end(int segment) const { return joint_points[2 * segment]; }
};

FrameChain forward_kinematics(const Config& q, const ManipulatorParams& params);

inline Vec3 end_effector(const Config& q, const ManipulatorParams& params) {
  return forward_kinematics(q, params).end_effector();
}

/// Point at arc fraction beta in [0, 1] of continuum segment 1 or 2.
Vec3 point_on_continuum(const Config& q, int segment, double beta,
                        const ManipulatorParams& params);

/// Point at distance `arc_length` in [0, L_gi] from the start of rigid link i.
Vec3 point_on_rigid(const Config& q, int segment, double arc_length,
                    const ManipulatorParams& params);

}  // namespace crplan
