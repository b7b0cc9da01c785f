#include "crplan/jacobian.hpp"

#include "crplan/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace crplan {

namespace {

Mat3 skew_z() {
  Mat3 k;
  k << 0.0, -1.0, 0.0,
       1.0, 0.0, 0.0,
       0.0, 0.0, 0.0;
  return k;
}

Mat3 rot_y_dtheta(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 d;
  d << -s, 0.0, c,
       0.0, 0.0, 0.0,
       -c, 0.0, -s;
  return d;
}

// Rotation across one segment and its partials w.r.t. (theta, delta).
struct SegmentFrame {
  Mat3 wrist;     // Rz(delta)
  Mat3 rotation;  // Rz(delta) Ry(theta) Rz(-delta)
  Mat3 d_theta;
  Mat3 d_delta;
};

SegmentFrame segment_frame(double theta, double delta) {
  const Mat3 k = skew_z();
  SegmentFrame f;
  f.wrist = rot_z(delta);
  f.rotation = f.wrist * rot_y(theta) * f.wrist.transpose();
  f.d_theta = f.wrist * rot_y_dtheta(theta) * f.wrist.transpose();
  f.d_delta = k * f.rotation - f.rotation * k;
  return f;
}

}  // namespace

PointDescriptor end_effector_descriptor(const ManipulatorParams& params) {
  return {LinkId::Rigid2, params.rigid_length2};
}

void validate_descriptor(const PointDescriptor& pd, const ManipulatorParams& params) {
  const double hi = is_continuum(pd.link) ? 1.0 : params.rigid_length(segment_of(pd.link));
  if (!(pd.local_coord >= 0.0 && pd.local_coord <= hi)) {
    throw std::invalid_argument(std::string("local coordinate outside link ") +
                                link_name(pd.link));
  }
}

Vec3 point_position(const Config& q, const PointDescriptor& pd,
                    const ManipulatorParams& params) {
  const int seg = segment_of(pd.link);
  return is_continuum(pd.link) ? point_on_continuum(q, seg, pd.local_coord, params)
                               : point_on_rigid(q, seg, pd.local_coord, params);
}

Mat34 analytic_point_jacobian(const Config& q, const PointDescriptor& pd,
                              const ManipulatorParams& params) {
  const Mat3 k = skew_z();
  const double ls = params.spring_length;
  const Vec3 ez = Vec3::UnitZ();
  Mat34 j = Mat34::Zero();

  const SegmentFrame s1 = segment_frame(q.theta1, q.delta1);
  const double beta1 = pd.link == LinkId::Continuum1 ? pd.local_coord : 1.0;
  const Vec3 a1 = arc_point_local(q.theta1, beta1, ls);
  j.col(0) = s1.wrist * arc_point_local_dtheta(q.theta1, beta1, ls);
  j.col(1) = k * s1.wrist * a1;
  if (pd.link == LinkId::Continuum1) return j;

  const double len1 = pd.link == LinkId::Rigid1 ? pd.local_coord : params.rigid_length1;
  j.col(0) += s1.d_theta * ez * len1;
  j.col(1) += s1.d_delta * ez * len1;
  if (pd.link == LinkId::Rigid1) return j;

  const SegmentFrame s2 = segment_frame(q.theta2, q.delta2);
  const double beta2 = pd.link == LinkId::Continuum2 ? pd.local_coord : 1.0;
  const Vec3 a2 = s2.wrist * arc_point_local(q.theta2, beta2, ls);
  j.col(0) += s1.d_theta * a2;
  j.col(1) += s1.d_delta * a2;
  j.col(2) = s1.rotation * s2.wrist * arc_point_local_dtheta(q.theta2, beta2, ls);
  j.col(3) = s1.rotation * k * a2;
  if (pd.link == LinkId::Continuum2) return j;

  const Vec3 tip = ez * pd.local_coord;
  j.col(0) += s1.d_theta * s2.rotation * tip;
  j.col(1) += s1.d_delta * s2.rotation * tip;
  j.col(2) += s1.rotation * s2.d_theta * tip;
  j.col(3) += s1.rotation * s2.d_delta * tip;
  return j;
}

Mat34 finite_difference_jacobian(const std::function<Vec3(const Config&)>& position,
                                 const Config& q, double step) {
  Mat34 j;
  const Vec4 base = q.vec();
  for (int c = 0; c < 4; ++c) {
    Vec4 plus = base;
    Vec4 minus = base;
    plus[c] += step;
    minus[c] -= step;
    j.col(c) = (position(Config::from_vec(plus)) - position(Config::from_vec(minus))) /
               (2.0 * step);
  }
  return j;
}

Mat34 point_jacobian(const Config& q, const PointDescriptor& pd,
                     const ManipulatorParams& params) {
  if (params.jacobian_mode == JacobianMode::FiniteDifference) {
    return finite_difference_jacobian(
        [&](const Config& x) { return point_position(x, pd, params); }, q);
  }
  return analytic_point_jacobian(q, pd, params);
}

Mat34 end_effector_jacobian(const Config& q, const ManipulatorParams& params) {
  return point_jacobian(q, end_effector_descriptor(params), params);
}

namespace {

template <class M, class Inv>
Inv svd_inverse(const M& m, double tol, double damping) {
  Eigen::JacobiSVD<M> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  Inv inv = Inv::Zero(m.cols(), m.rows());
  if (sigma.size() == 0) return inv;
  const double cutoff = tol * sigma[0];
  const double d2 = damping * damping;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    double gain = 0.0;
    if (damping > 0.0) {
      gain = sigma[i] / (sigma[i] * sigma[i] + d2);
    } else if (sigma[i] > cutoff && sigma[i] > 0.0) {
      gain = 1.0 / sigma[i];
    }
    if (gain != 0.0) inv += svd.matrixV().col(i) * gain * svd.matrixU().col(i).transpose();
  }
  return inv;
}

}  // namespace

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double tol) {
  return svd_inverse<Eigen::MatrixXd, Eigen::MatrixXd>(m, tol, 0.0);
}

Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& m, double damping) {
  return svd_inverse<Eigen::MatrixXd, Eigen::MatrixXd>(m, 0.0, damping);
}

Mat43 pseudo_inverse(const Mat34& m, double tol) {
  return svd_inverse<Mat34, Mat43>(m, tol, 0.0);
}

Mat43 damped_pseudo_inverse(const Mat34& m, double damping) {
  return svd_inverse<Mat34, Mat43>(m, 0.0, damping);
}

Mat4 null_space_projector(const Mat34& j, double tol) {
  return Mat4::Identity() - pseudo_inverse(j, tol) * j;
}

WeightState WeightState::at(const Config& q, const std::array<JointRange, 4>& limits) {
  return {q, joint_limit_gradient(q, limits)};
}

Vec4 joint_limit_gradient(const Config& q, const std::array<JointRange, 4>& limits) {
  Vec4 grad = Vec4::Zero();
  const Vec4 v = q.vec();
  for (int i : {0, 2}) {
    const double lo = limits[i].lo;
    const double hi = limits[i].hi;
    const double range = hi - lo;
    // Stay strictly inside so a clamped coordinate gets a large finite value.
    const double margin = 1e-9 * range;
    const double x = std::clamp(v[i], lo + margin, hi - margin);
    const double num = range * range * (2.0 * x - hi - lo);
    const double den = 4.0 * (hi - x) * (hi - x) * (x - lo) * (x - lo);
    grad[i] = std::abs(num / den);
  }
  return grad;
}

Mat4 joint_limit_weights(const Config& q, const WeightState& state,
                         const std::array<JointRange, 4>& limits) {
  const Vec4 grad = joint_limit_gradient(q, limits);
  Vec4 w = Vec4::Ones();
  for (int i = 0; i < 4; ++i) {
    if (grad[i] > state.limit_gradient[i]) w[i] = 1.0 + grad[i];
  }
  return w.asDiagonal();
}

}  // namespace crplan
