#include "crplan/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crplan {

namespace {

constexpr double kDegenerateLength = 1e-12;

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

ArcSegment continuum_arc(const FrameChain& chain, const Config& q, int segment,
                         const ManipulatorParams& params) {
  const auto& center = chain.arc_centers[segment - 1];
  if (!center) throw std::invalid_argument("continuum segment is straight");
  ArcSegment arc;
  arc.center = *center;
  arc.normal = chain.arc_normals[segment - 1];
  arc.bend_angle = q.theta(segment);
  arc.radius = params.spring_length / arc.bend_angle;
  arc.start = chain.segment_start(segment);
  arc.end = chain.spring_end(segment);
  return arc;
}

std::optional<Vec3> closest_point_on_circle(const ArcSegment& arc, const Vec3& p) {
  const Vec3 op = p - arc.center;
  const Vec3 od = op - arc.normal.dot(op) * arc.normal;
  const double len = od.norm();
  if (len < kDegenerateLength) return std::nullopt;
  return Vec3(arc.center + arc.radius * od / len);
}

ArcClosest closest_point_on_arc(const ArcSegment& arc, const Vec3& p) {
  const auto cs = closest_point_on_circle(arc, p);
  if (!cs) return {arc.start, ArcCase::Degenerate};

  const Vec3 oc = *cs - arc.center;
  const Vec3 os = arc.start - arc.center;
  const Vec3 oe = arc.end - arc.center;
  const double theta_s = angle_between(oc, os);
  const double theta_e = angle_between(oc, oe);
  // The angle sum alone cannot separate the two halves of a semicircle; the
  // arc leaves its start along normal x (start - center).
  const Vec3 tangent = arc.normal.cross(os);
  const bool forward_side = oc.dot(tangent) >= -1e-9 * arc.radius * arc.radius;
  if (std::abs(theta_s + theta_e - arc.bend_angle) <= kOnArcAngleTolerance && forward_side) {
    return {*cs, ArcCase::OnArc};
  }
  if ((p - arc.start).norm() <= (p - arc.end).norm()) return {arc.start, ArcCase::Start};
  return {arc.end, ArcCase::End};
}

SegmentClosest closest_point_on_segment(const Vec3& start, const Vec3& end, const Vec3& p) {
  const Vec3 se = end - start;
  const double len2 = se.squaredNorm();
  if (std::sqrt(len2) < kDegenerateLength) return {start, 0.0};
  const double alpha = (p - start).dot(se) / len2;
  if (alpha <= 0.0) return {start, 0.0};
  if (alpha >= 1.0) return {end, 1.0};
  return {start + alpha * se, alpha};
}

ProximityResult obstacle_proximity(const FrameChain& chain, const Config& q,
                                   const ManipulatorParams& params,
                                   const SphereObstacle& obstacle, std::size_t index) {
  const Vec3& target = obstacle.center;
  ProximityResult best;
  best.obstacle_index = index;
  double best_dist = std::numeric_limits<double>::infinity();

  auto consider = [&](const Vec3& point, LinkId link, double coord) {
    const double dist = (point - target).norm();
    // <= so that later (more distal) links win ties.
    if (dist <= best_dist) {
      best_dist = dist;
      best.closest_point = point;
      best.link = link;
      best.local_coord = coord;
    }
  };

  for (int seg = 1; seg <= 2; ++seg) {
    const LinkId cont = seg == 1 ? LinkId::Continuum1 : LinkId::Continuum2;
    const LinkId rigid = seg == 1 ? LinkId::Rigid1 : LinkId::Rigid2;
    if (chain.arc_centers[seg - 1]) {
      const ArcSegment arc = continuum_arc(chain, q, seg, params);
      const ArcClosest c = closest_point_on_arc(arc, target);
      double beta = 0.0;
      if (c.tag == ArcCase::End) {
        beta = 1.0;
      } else if (c.tag == ArcCase::OnArc) {
        beta = std::clamp(
            angle_between(c.point - arc.center, arc.start - arc.center) / arc.bend_angle,
            0.0, 1.0);
      }
      consider(c.point, cont, beta);
    } else {
      const SegmentClosest c =
          closest_point_on_segment(chain.segment_start(seg), chain.spring_end(seg), target);
      consider(c.point, cont, c.alpha);
    }
    const SegmentClosest r =
        closest_point_on_segment(chain.spring_end(seg), chain.rigid_end(seg), target);
    consider(r.point, rigid, r.alpha * params.rigid_length(seg));
  }
  best.clearance = best_dist - obstacle.radius - params.body_radius;
  return best;
}

std::vector<ProximityResult> obstacle_proximities(const Config& q,
                                                  const ManipulatorParams& params,
                                                  std::span<const SphereObstacle> obstacles) {
  const FrameChain chain = forward_kinematics(q, params);
  std::vector<ProximityResult> out;
  out.reserve(obstacles.size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    out.push_back(obstacle_proximity(chain, q, params, obstacles[i], i));
  }
  return out;
}

ProximityResult manipulator_min_distance(const Config& q, const ManipulatorParams& params,
                                         std::span<const SphereObstacle> obstacles) {
  if (obstacles.empty()) throw std::invalid_argument("no obstacles given");
  const auto all = obstacle_proximities(q, params, obstacles);
  const ProximityResult* best = &all.front();
  for (const auto& r : all) {
    if (r.clearance < best->clearance) best = &r;
  }
  return *best;
}

bool config_collision_free(const Config& q, const ManipulatorParams& params,
                           std::span<const SphereObstacle> obstacles) {
  if (obstacles.empty()) return true;
  return manipulator_min_distance(q, params, obstacles).clearance > 0.0;
}

}  // namespace crplan
