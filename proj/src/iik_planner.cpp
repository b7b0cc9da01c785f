#include "crplan/iik_planner.hpp"

#include "crplan/kinematics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace crplan {

namespace {

Mat4 inverse_sqrt_weights(const Mat4& weights) {
  return weights.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
}

// Inverse of the weighted task Jacobian: plain pseudo-inverse when well
// conditioned, damped by (threshold - sigma_min) near a singularity.
Mat43 task_inverse(const Mat34& jwe, const ManipulatorParams& params) {
  Eigen::JacobiSVD<Mat34> svd(jwe, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (sigma[0] <= params.pinv_tolerance) {
    throw SingularTaskError("weighted task Jacobian has no usable singular value");
  }
  const double damping = std::max(0.0, params.dls_threshold - sigma[2]);
  const double d2 = damping * damping;
  Mat43 inv = Mat43::Zero();
  for (int i = 0; i < 3; ++i) {
    double gain = 0.0;
    if (damping > 0.0) {
      gain = sigma[i] / (sigma[i] * sigma[i] + d2);
    } else if (sigma[i] > params.pinv_tolerance * sigma[0]) {
      gain = 1.0 / sigma[i];
    }
    inv += svd.matrixV().col(i) * gain * svd.matrixU().col(i).transpose();
  }
  return inv;
}

// Quantities of one step shared by the tracking and avoidance terms.
struct StepFrame {
  Mat4 w_inv_sqrt;
  Mat34 je;
  Mat43 jwe_inv;

  StepFrame(const Config& q, const Mat4& weights, const ManipulatorParams& params)
      : w_inv_sqrt(inverse_sqrt_weights(weights)),
        je(end_effector_jacobian(q, params)),
        jwe_inv(task_inverse(je * w_inv_sqrt, params)) {}

  Vec4 tracking(const Vec3& p_f) const { return w_inv_sqrt * (jwe_inv * p_f); }
};

Vec4 avoidance_term(const StepFrame& f, const Mat34& jc, const Vec3& p_e,
                    const ProximityResult& prox, const SphereObstacle& obstacle,
                    const AvoidanceGains& gains, const ManipulatorParams& params) {
  const double gh = gain_h(prox.clearance, gains);
  if (!(gh > 0.0)) return Vec4::Zero();
  const double gv = gain_v(prox.clearance, gains);
  const Mat4 projector = null_space_projector(f.je, params.pinv_tolerance);
  const Mat34 jcn = jc * projector;
  const Vec3 p_o = escape_velocity(prox.closest_point, obstacle.center, gains.k);
  // Weighted closest-point Jacobian times the weighted task inverse.
  const Vec3 rhs = gv * p_o - jc * (f.w_inv_sqrt * (f.jwe_inv * p_e));

  Eigen::JacobiSVD<Mat34> svd(jcn);
  const double sigma = svd.singularValues()[0];
  const Mat43 jcn_inv = sigma < params.avoidance_dls_threshold
                            ? damped_pseudo_inverse(jcn, params.avoidance_dls_threshold - sigma)
                            : pseudo_inverse(jcn, params.pinv_tolerance);
  return gh * projector * (jcn_inv * rhs);
}

IikStep finish_step(const Config& q_old, const Vec4& tracking, const Vec4& null_space) {
  IikStep step;
  step.tracking_term = tracking;
  step.null_space_term = null_space;
  step.raw = Config::from_vec(q_old.vec() + tracking + null_space);
  step.config = step.raw.canonical();
  return step;
}

}  // namespace

void AvoidanceGains::validate() const {
  if (!(r_min > 0.0)) throw std::invalid_argument("r_min must be > 0");
  if (!(r_max > r_min)) throw std::invalid_argument("r_max must be > r_min");
  if (!(r > r_max)) throw std::invalid_argument("r must be > r_max");
  if (!(k > 0.0)) throw std::invalid_argument("k must be > 0");
}

double gain_h(double d, const AvoidanceGains& gains) {
  if (d <= gains.r_max) return 1.0;
  if (d >= gains.r) return 0.0;
  return 0.5 + 0.5 * std::cos(kPi * (d - gains.r_max) / (gains.r - gains.r_max));
}

double gain_v(double d, const AvoidanceGains& gains) {
  if (d <= gains.r_min) return 1.0;
  if (d >= gains.r_max) return 0.0;
  const double s = (d - gains.r_max) / (gains.r_max - gains.r_min);
  return s * s;
}

Vec3 corrected_task_velocity(const Vec3& p_expected_old, const Vec3& p_actual_old,
                             const Vec3& p_dot) {
  return p_dot + p_expected_old - p_actual_old;
}

Vec3 escape_velocity(const Vec3& closest, const Vec3& obstacle_center, double k) {
  const Vec3 to_obstacle = obstacle_center - closest;
  const double len = to_obstacle.norm();
  if (len < 1e-12) throw std::domain_error("closest point coincides with obstacle center");
  return -k * to_obstacle / len;
}

IikStep iik_step_biased(const Config& q_old, const Vec3& p_f, const Vec4& mu,
                        const Mat4& weights, const ManipulatorParams& params) {
  const StepFrame f(q_old, weights, params);
  const Vec4 tracking = p_f.isZero(0.0) ? Vec4::Zero() : f.tracking(p_f);
  const Vec4 bias =
      mu.isZero(0.0) ? Vec4::Zero() : Vec4(null_space_projector(f.je, params.pinv_tolerance) * mu);
  return finish_step(q_old, tracking, bias);
}

IikStep iik_step_basic(const Config& q_old, const Vec3& p_f, const Mat4& weights,
                       const ManipulatorParams& params) {
  return iik_step_biased(q_old, p_f, Vec4::Zero(), weights, params);
}

IikStep iik_step_avoid(const Config& q_old, const Vec3& p_f, const Vec3& p_e,
                       const ProximityResult& prox, const SphereObstacle& obstacle,
                       const AvoidanceGains& gains, const Mat4& weights,
                       const ManipulatorParams& params) {
  const StepFrame f(q_old, weights, params);
  const Mat34 jc = point_jacobian(q_old, prox.descriptor(), params);
  return finish_step(q_old, f.tracking(p_f),
                     avoidance_term(f, jc, p_e, prox, obstacle, gains, params));
}

double StepRecord::min_clearance() const {
  if (clearances.empty()) return std::numeric_limits<double>::infinity();
  return *std::min_element(clearances.begin(), clearances.end());
}

double Trajectory::min_clearance() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : steps) m = std::min(m, s.min_clearance());
  return m;
}

double Trajectory::max_tracking_error() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.tracking_error);
  return m;
}

StepRecord make_step_record(const Config& q, const Vec3& expected,
                            std::span<const SphereObstacle> obstacles,
                            const ManipulatorParams& params) {
  StepRecord rec;
  rec.config = q;
  rec.ee_actual = end_effector(q, params);
  rec.ee_expected = expected;
  rec.tracking_error = (rec.ee_actual - expected).norm();
  const auto prox = obstacle_proximities(q, params, obstacles);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : prox) {
    rec.clearances.push_back(p.clearance);
    if (p.clearance < best) {
      best = p.clearance;
      rec.closest_link = p.link;
      rec.closest_coord = p.local_coord;
    }
  }
  rec.pre_step_clearance = best;
  return rec;
}

bool closest_point_is_end_effector(const ProximityResult& prox,
                                   const ManipulatorParams& params,
                                   double end_effector_fraction) {
  return prox.link == LinkId::Rigid2 &&
         prox.local_coord > end_effector_fraction * params.rigid_length2;
}

Trajectory plan_motion(std::span<const Vec3> path, const Config& q_init,
                       std::span<const SphereObstacle> obstacles,
                       const AvoidanceGains& gains, const ManipulatorParams& params,
                       const PlannerOptions& options) {
  using Clock = std::chrono::steady_clock;
  if (path.empty()) throw std::invalid_argument("path is empty");
  if ((end_effector(q_init, params) - path.front()).norm() > 1.0) {
    throw std::invalid_argument("initial end effector is more than 1 mm from the path start");
  }

  Trajectory traj;
  traj.path.assign(path.begin(), path.end());
  Config q = q_init.canonical();
  traj.steps.push_back(make_step_record(q, path.front(), obstacles, params));
  WeightState weights_state = WeightState::at(q, params.joint_limits);

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto t0 = Clock::now();
    const Vec3 p_e = path[i + 1] - path[i];
    const Vec3 p_f = options.drift_correction
                         ? corrected_task_velocity(path[i], end_effector(q, params), p_e)
                         : p_e;
    const Mat4 w = joint_limit_weights(q, weights_state, params.joint_limits);
    const StepFrame frame(q, w, params);
    const Vec4 tracking = frame.tracking(p_f);
    IikStep step = finish_step(q, tracking, Vec4::Zero());

    bool active = false;
    double gh = 0.0;
    double gv = 0.0;
    double pre_clearance = std::numeric_limits<double>::infinity();
    if (!obstacles.empty()) {
      const ProximityResult prox = manipulator_min_distance(q, params, obstacles);
      pre_clearance = prox.clearance;
      gh = gain_h(prox.clearance, gains);
      gv = gain_v(prox.clearance, gains);
      if (options.avoidance && prox.clearance < gains.r &&
          !closest_point_is_end_effector(prox, params, options.end_effector_fraction)) {
        const SphereObstacle& obstacle = obstacles[prox.obstacle_index];
        const Mat34 jc = point_jacobian(q, prox.descriptor(), params);
        const Vec3 closest_velocity = jc * (step.raw.vec() - q.vec());
        if (closest_velocity.dot(obstacle.center - prox.closest_point) > 0.0) {
          step = finish_step(q, tracking,
                             avoidance_term(frame, jc, p_e, prox, obstacle, gains, params));
          active = true;
        }
      }
    }
    const auto t1 = Clock::now();

    StepRecord rec = make_step_record(step.config, path[i + 1], obstacles, params);
    rec.g_h = gh;
    rec.g_v = gv;
    rec.avoidance_active = active;
    rec.pre_step_clearance = pre_clearance;
    if (active) {
      rec.null_space_residual =
          (end_effector_jacobian(q, params) * step.null_space_term).norm();
    }
    rec.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (rec.min_clearance() <= 0.0) traj.colliding = true;
    traj.steps.push_back(std::move(rec));

    weights_state = WeightState::at(q, params.joint_limits);
    q = step.config;
  }
  if (traj.steps.front().min_clearance() <= 0.0) traj.colliding = true;
  return traj;
}

}  // namespace crplan
