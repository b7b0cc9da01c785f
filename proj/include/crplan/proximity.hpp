#pragma once

#include "crplan/jacobian.hpp"
#include "crplan/kinematics.hpp"
#include "crplan/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace crplan {

/// Circular arc of a bent continuum segment's centerline.
struct ArcSegment {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitY();  // unit normal of the arc plane
  double radius = 0.0;
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  double bend_angle = 0.0;  // angle subtended by the arc, in (0, pi]
};

/// Arc of continuum segment 1 or 2. Requires theta >= straight threshold.
ArcSegment continuum_arc(const FrameChain& chain, const Config& q, int segment,
                         const ManipulatorParams& params);

/// Closest point to `p` on the full circle carrying `arc`. Empty when the
/// projection of p onto the circle plane falls on the center (< 1e-12 mm).
std::optional<Vec3> closest_point_on_circle(const ArcSegment& arc, const Vec3& p);

enum class ArcCase { OnArc, Start, End, Degenerate };

struct ArcClosest {
  Vec3 point;
  ArcCase tag;
};

inline constexpr double kOnArcAngleTolerance = 1e-9;

/// Closest point on the arc: the circle point when the angles it makes with
/// the two endpoints add up to the bend angle, otherwise the nearer
/// endpoint; the start point when the projection hits the center.
ArcClosest closest_point_on_arc(const ArcSegment& arc, const Vec3& p);

struct SegmentClosest {
  Vec3 point;
  double alpha;  // parameter along start -> end, clamped to [0, 1]
};

/// Closest point on segment [start, end]. A degenerate segment
/// (|end - start| < 1e-12 mm) returns start with alpha = 0.
SegmentClosest closest_point_on_segment(const Vec3& start, const Vec3& end, const Vec3& p);

struct ProximityResult {
  Vec3 closest_point = Vec3::Zero();
  // centerline distance - obstacle radius - body radius [mm]
  double clearance = 0.0;
  LinkId link = LinkId::Continuum1;
  double local_coord = 0.0;
  std::size_t obstacle_index = 0;

  PointDescriptor descriptor() const { return {link, local_coord}; }
};

/// Closest centerline point to one obstacle, over all four links. Ties go to
/// the more distal link.
ProximityResult obstacle_proximity(const FrameChain& chain, const Config& q,
                                   const ManipulatorParams& params,
                                   const SphereObstacle& obstacle, std::size_t index);

/// One result per obstacle, in obstacle order.
std::vector<ProximityResult> obstacle_proximities(const Config& q,
                                                  const ManipulatorParams& params,
                                                  std::span<const SphereObstacle> obstacles);

/// Global minimum clearance. Throws std::invalid_argument for an empty
/// obstacle list.
ProximityResult manipulator_min_distance(const Config& q, const ManipulatorParams& params,
                                         std::span<const SphereObstacle> obstacles);

/// True iff every obstacle clearance is strictly positive. An empty obstacle
/// list is always free.
bool config_collision_free(const Config& q, const ManipulatorParams& params,
                           std::span<const SphereObstacle> obstacles);

}  // namespace crplan
