#pragma once

#include "crplan/types.hpp"

#include <functional>

namespace crplan {

/// A point on the manipulator centerline. `local_coord` is the arc fraction
/// beta in [0, 1] on continuum links, or the distance L_go in [0, L_gi] from
/// the start of a rigid link.
struct PointDescriptor {
  LinkId link = LinkId::Rigid2;
  double local_coord = 0.0;
};

/// The tool tip: distal end of the second rigid link.
PointDescriptor end_effector_descriptor(const ManipulatorParams& params);

/// Throws std::invalid_argument if local_coord lies outside the link.
void validate_descriptor(const PointDescriptor& pd, const ManipulatorParams& params);

Vec3 point_position(const Config& q, const PointDescriptor& pd,
                    const ManipulatorParams& params);

/// 3x4 Jacobian of the point's position with respect to q. Uses the
/// closed-form derivative unless params.jacobian_mode selects finite
/// differences. Columns of joints distal to the point are zero.
Mat34 point_jacobian(const Config& q, const PointDescriptor& pd,
                     const ManipulatorParams& params);

Mat34 end_effector_jacobian(const Config& q, const ManipulatorParams& params);

/// Closed-form point Jacobian regardless of jacobian_mode.
Mat34 analytic_point_jacobian(const Config& q, const PointDescriptor& pd,
                              const ManipulatorParams& params);

/// Central differences of an arbitrary position map.
Mat34 finite_difference_jacobian(const std::function<Vec3(const Config&)>& position,
                                 const Config& q, double step = 1e-6);

/// Moore-Penrose pseudo-inverse through the SVD. Singular values at or below
/// tol * sigma_max are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double tol);

/// Damped least-squares inverse V diag(s / (s^2 + damping^2)) U^T.
Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& m, double damping);

/// I - J^+ J.
Mat4 null_space_projector(const Mat34& j, double tol);

// Fixed-size versions of the two inverses for 3x4 Jacobians.
Mat43 pseudo_inverse(const Mat34& m, double tol);
Mat43 damped_pseudo_inverse(const Mat34& m, double damping);

/// Weight bookkeeping between IIK steps. `limit_gradient` holds
/// |dH/dq| evaluated at previous_config.
struct WeightState {
  Config previous_config;
  Vec4 limit_gradient = Vec4::Zero();

  static WeightState at(const Config& q, const std::array<JointRange, 4>& limits);
};

/// |dH/dq| of the joint-limit criterion
///   H(q) = sum_i (hi - lo)^2 / (4 (hi - q_i)(q_i - lo))
/// taken over the bend angles. Wrist angles are periodic and contribute 0.
Vec4 joint_limit_gradient(const Config& q, const std::array<JointRange, 4>& limits);

/// Diagonal weights w_i = 1 + |dH/dq_i| while coordinate i is heading into a
/// limit (|dH/dq_i| grew since the previous step), and w_i = 1 otherwise.
Mat4 joint_limit_weights(const Config& q, const WeightState& state,
                         const std::array<JointRange, 4>& limits);

}  // namespace crplan
