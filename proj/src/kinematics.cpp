#include "crplan/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace crplan {

namespace {

// (1 - cos x) / x and sin x / x with their derivatives, series near zero.
double versinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return x * (0.5 - x2 / 24.0);
  }
  return (1.0 - std::cos(x)) / x;
}

double versinc_prime(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 0.5 - x2 / 8.0;
  }
  return (x * std::sin(x) - (1.0 - std::cos(x))) / (x * x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

double sinc_prime(double x) {
  if (std::abs(x) < 1e-4) {
    return -x / 3.0 + x * x * x / 30.0;
  }
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

}  // namespace

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

namespace {

// A negative bend is the same arc bent the other way: (-theta, delta) and
// (theta, delta + pi) give identical shapes.
std::pair<double, double> canonical_segment(double theta, double delta) {
  if (theta < 0.0) {
    theta = -theta;
    delta += kPi;
  }
  return {std::min(theta, kPi), wrap_angle(delta)};
}

}  // namespace

Config Config::canonical() const {
  const auto [t1, d1] = canonical_segment(theta1, delta1);
  const auto [t2, d2] = canonical_segment(theta2, delta2);
  return {t1, d1, t2, d2};
}

const char* link_name(LinkId id) {
  switch (id) {
    case LinkId::Continuum1: return "C1";
    case LinkId::Rigid1: return "R1";
    case LinkId::Continuum2: return "C2";
    case LinkId::Rigid2: return "R2";
  }
  return "?";
}

void ManipulatorParams::validate() const {
  if (!(spring_length > 0.0)) throw std::invalid_argument("spring_length must be > 0");
  if (!(rigid_length1 > 0.0)) throw std::invalid_argument("rigid_length1 must be > 0");
  if (!(rigid_length2 > 0.0)) throw std::invalid_argument("rigid_length2 must be > 0");
  if (!(body_radius >= 0.0)) throw std::invalid_argument("body_radius must be >= 0");
  if (!(straight_threshold > 0.0 && straight_threshold < 1e-2)) {
    throw std::invalid_argument("straight_threshold must be in (0, 1e-2)");
  }
  for (const auto& r : joint_limits) {
    if (!(r.lo < r.hi)) throw std::invalid_argument("joint limit lo must be < hi");
  }
  if (!(pinv_tolerance > 0.0)) throw std::invalid_argument("pinv_tolerance must be > 0");
  if (!(dls_threshold >= 0.0)) throw std::invalid_argument("dls_threshold must be >= 0");
  if (!(avoidance_dls_threshold >= 0.0)) {
    throw std::invalid_argument("avoidance_dls_threshold must be >= 0");
  }
}

Mat3 rot_z(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 rot_y(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix();
}

Mat3 segment_rotation(double theta, double delta) {
  const Mat3 wrist = rot_z(delta);
  return wrist * rot_y(theta) * wrist.transpose();
}

Vec3 arc_point_local(double theta, double beta, double spring_length) {
  const double x = beta * theta;
  const double s = beta * spring_length;
  return {s * versinc(x), 0.0, s * sinc(x)};
}

Vec3 arc_point_local_dtheta(double theta, double beta, double spring_length) {
  const double x = beta * theta;
  const double s = beta * beta * spring_length;
  return {s * versinc_prime(x), 0.0, s * sinc_prime(x)};
}

Vec3 spring_endpoint_local(double theta, const ManipulatorParams& params) {
  if (std::abs(theta) < params.straight_threshold) {
    return {0.0, 0.0, params.spring_length};
  }
  return (params.spring_length / theta) *
         Vec3(1.0 - std::cos(theta), 0.0, std::sin(theta));
}

FrameChain forward_kinematics(const Config& q, const ManipulatorParams& params) {
  FrameChain chain;
  Vec3 p = Vec3::Zero();
  Mat3 base = Mat3::Identity();
  chain.joint_points[0] = p;
  for (int seg = 1; seg <= 2; ++seg) {
    const double theta = q.theta(seg);
    const double delta = q.delta(seg);
    const int i = seg - 1;
    const Mat3 plane = base * rot_z(delta);
    chain.base_rotations[i] = base;
    chain.arc_normals[i] = plane * Vec3::UnitY();
    if (std::abs(theta) >= params.straight_threshold) {
      chain.arc_centers[i] = p + plane * Vec3(params.spring_length / theta, 0.0, 0.0);
    }
    p += plane * spring_endpoint_local(theta, params);
    chain.joint_points[2 * seg - 1] = p;

    chain.segment_rotations[i] = segment_rotation(theta, delta);
    base = base * chain.segment_rotations[i];
    p += base * Vec3(0.0, 0.0, params.rigid_length(seg));
    chain.joint_points[2 * seg] = p;
  }
  return chain;
}

Vec3 point_on_continuum(const Config& q, int segment, double beta,
                        const ManipulatorParams& params) {
  const FrameChain chain = forward_kinematics(q, params);
  const double theta = q.theta(segment);
  const Mat3 plane = chain.base_rotations[segment - 1] * rot_z(q.delta(segment));
  const Vec3 local = std::abs(theta) < params.straight_threshold
                         ? Vec3(0.0, 0.0, beta * params.spring_length)
                         : arc_point_local(theta, beta, params.spring_length);
  return chain.segment_start(segment) + plane * local;
}

Vec3 point_on_rigid(const Config& q, int segment, double arc_length,
                    const ManipulatorParams& params) {
  const FrameChain chain = forward_kinematics(q, params);
  const Mat3 tip = chain.base_rotations[segment - 1] * chain.segment_rotations[segment - 1];
  return chain.spring_end(segment) + tip * Vec3(0.0, 0.0, arc_length);
}

}  // namespace crplan
