#include "crplan/srrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace crplan {

namespace {

double point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Shrinking-ball radius gamma * (log n / n)^(1/3) for a 3-D search, capped.
double rewire_radius(std::size_t n, double volume, const RrtOptions& options) {
  const double unit_ball = 4.0 / 3.0 * kPi;
  const double gamma = 2.0 * std::cbrt(4.0 / 3.0) * std::cbrt(volume / unit_ball);
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  return std::min(gamma * std::cbrt(std::log(nn) / nn), options.rewire_cap);
}

std::size_t nearest(const std::vector<TreeNode>& tree, const Vec3& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const double d = (tree[i].position - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> near(const std::vector<TreeNode>& tree, const Vec3& p, double radius) {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if ((tree[i].position - p).squaredNorm() <= r2) out.push_back(i);
  }
  return out;
}

WorkspacePath extract(const std::vector<TreeNode>& tree, std::size_t leaf) {
  WorkspacePath path;
  std::optional<std::size_t> cur = leaf;
  while (cur) {
    path.push_back(tree[*cur].position);
    cur = tree[*cur].parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Propagates a cost change at `root` to its descendants.
void propagate_cost(std::vector<TreeNode>& tree, std::size_t root) {
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (tree[i].parent == n) {
        tree[i].cost = tree[n].cost + (tree[i].position - tree[n].position).norm();
        stack.push_back(i);
      }
    }
  }
}

// Polyline resampled to n points with every original vertex kept, so each
// chord lies on the polyline.
WorkspacePath resample_keep_vertices(std::span<const Vec3> poly, std::size_t n) {
  const std::size_t edges = poly.size() - 1;
  const std::size_t extra = n - poly.size();
  const double total = path_length(poly);
  std::vector<std::size_t> per_edge(edges, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t e = 0; e < edges; ++e) {
    const double share =
        total > 0.0 ? extra * (poly[e + 1] - poly[e]).norm() / total : double(extra) / edges;
    per_edge[e] = static_cast<std::size_t>(std::floor(share));
    assigned += per_edge[e];
    remainders.emplace_back(share - per_edge[e], e);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < extra; ++i, ++assigned) {
    ++per_edge[remainders[i % edges].second];
  }
  WorkspacePath out;
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t k = per_edge[e] + 1;
    for (std::size_t j = 0; j < k; ++j) {
      const double t = static_cast<double>(j) / k;
      out.push_back(poly[e] + t * (poly[e + 1] - poly[e]));
    }
  }
  out.push_back(poly.back());
  return out;
}

WorkspacePath resample_arc_length(std::span<const Vec3> poly, std::size_t n) {
  const double total = path_length(poly);
  WorkspacePath out;
  std::size_t e = 0;
  double walked = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * i / (n - 1);
    while (e + 2 < poly.size() && walked + (poly[e + 1] - poly[e]).norm() < s) {
      walked += (poly[e + 1] - poly[e]).norm();
      ++e;
    }
    const double len = (poly[e + 1] - poly[e]).norm();
    const double t = len > 0.0 ? std::clamp((s - walked) / len, 0.0, 1.0) : 0.0;
    out.push_back(poly[e] + t * (poly[e + 1] - poly[e]));
  }
  out.front() = poly.front();
  out.back() = poly.back();
  return out;
}

WorkspacePath sample_spline(std::span<const Vec3> control, std::size_t n) {
  WorkspacePath out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(bspline_point(control, static_cast<double>(i) / (n - 1)));
  }
  out.front() = control.front();
  out.back() = control.back();
  return out;
}

WorkspacePath subdivide(std::span<const Vec3> poly) {
  WorkspacePath out;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    out.push_back(poly[i]);
    out.push_back(0.5 * (poly[i] + poly[i + 1]));
  }
  out.push_back(poly.back());
  return out;
}

}  // namespace

void SearchSpace::validate() const {
  if (!((min.array() < max.array()).all())) {
    throw std::invalid_argument("search space min must be < max componentwise");
  }
}

bool SearchSpace::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

double path_length(std::span<const Vec3> path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

bool segment_collision_free(const Vec3& a, const Vec3& b,
                            std::span<const SphereObstacle> obstacles, double clearance) {
  return std::all_of(obstacles.begin(), obstacles.end(), [&](const SphereObstacle& o) {
    return point_segment_distance(a, b, o.center) > o.radius + clearance;
  });
}

bool point_collision_free(const Vec3& p, std::span<const SphereObstacle> obstacles,
                          double clearance) {
  return segment_collision_free(p, p, obstacles, clearance);
}

bool path_collision_free(std::span<const Vec3> path, std::span<const SphereObstacle> obstacles,
                         double clearance) {
  if (path.size() == 1) return point_collision_free(path.front(), obstacles, clearance);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!segment_collision_free(path[i - 1], path[i], obstacles, clearance)) return false;
  }
  return true;
}

RrtResult rrt_star(const Vec3& start, const Vec3& goal,
                   std::span<const SphereObstacle> obstacles, const SearchSpace& space,
                   std::size_t max_iters, std::uint64_t seed, double clearance,
                   const RrtOptions& options) {
  space.validate();
  if (!space.contains(start) || !space.contains(goal)) {
    throw std::invalid_argument("start and goal must lie inside the search space");
  }
  if (!point_collision_free(start, obstacles, clearance) ||
      !point_collision_free(goal, obstacles, clearance)) {
    throw std::invalid_argument("start or goal is in collision");
  }

  RrtResult result;
  auto& tree = result.tree;
  tree.push_back({start, std::nullopt, 0.0});
  if ((goal - start).norm() == 0.0) {
    result.path = {start};
    return result;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::optional<std::size_t> goal_node;
  std::size_t after_goal = 0;
  const double volume = space.volume();

  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    if (goal_node && after_goal++ >= options.refine_iterations) break;

    Vec3 sample;
    if (unit(rng) < options.goal_bias) {
      sample = goal;
    } else {
      for (int a = 0; a < 3; ++a) sample[a] = space.min[a] + unit(rng) * (space.max[a] - space.min[a]);
    }
    if (!point_collision_free(sample, obstacles, clearance)) continue;

    const std::size_t near_idx = nearest(tree, sample);
    const Vec3 dir = sample - tree[near_idx].position;
    const double dist = dir.norm();
    if (dist == 0.0) continue;
    const Vec3 x_new = tree[near_idx].position + std::min(dist, options.step_length) * dir / dist;
    if (!segment_collision_free(tree[near_idx].position, x_new, obstacles, clearance)) continue;

    // Choose the cheapest collision-free parent within the ball.
    const double radius = std::max(rewire_radius(tree.size(), volume, options),
                                   std::min(options.step_length, options.rewire_cap));
    const auto neighbors = near(tree, x_new, radius);
    std::size_t parent = near_idx;
    double cost = tree[near_idx].cost + (x_new - tree[near_idx].position).norm();
    for (std::size_t n : neighbors) {
      const double c = tree[n].cost + (x_new - tree[n].position).norm();
      if (c < cost && segment_collision_free(tree[n].position, x_new, obstacles, clearance)) {
        parent = n;
        cost = c;
      }
    }
    const std::size_t new_idx = tree.size();
    tree.push_back({x_new, parent, cost});

    for (std::size_t n : neighbors) {
      if (n == parent) continue;
      const double c = cost + (tree[n].position - x_new).norm();
      if (c < tree[n].cost &&
          segment_collision_free(x_new, tree[n].position, obstacles, clearance)) {
        tree[n].parent = new_idx;
        tree[n].cost = c;
        propagate_cost(tree, n);
      }
    }

    if ((x_new - goal).norm() <= options.goal_radius) {
      const double c = cost + (goal - x_new).norm();
      if (!goal_node) {
        if (segment_collision_free(x_new, goal, obstacles, clearance)) {
          goal_node = tree.size();
          tree.push_back({goal, new_idx, c});
        }
      } else if (c < tree[*goal_node].cost &&
                 segment_collision_free(x_new, goal, obstacles, clearance)) {
        tree[*goal_node].parent = new_idx;
        tree[*goal_node].cost = c;
      }
    }
  }
  result.iterations = it;
  if (!goal_node) throw NoPathFound("RRT* exhausted its iterations before reaching the goal");
  result.path = extract(tree, *goal_node);
  return result;
}

WorkspacePath prune_path(std::span<const Vec3> path, std::span<const SphereObstacle> obstacles,
                         double clearance) {
  if (path.size() <= 2) return {path.begin(), path.end()};
  WorkspacePath out{path.front()};
  std::size_t anchor = 0;
  while (anchor + 1 < path.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t j = path.size() - 1; j > anchor + 1; --j) {
      if (segment_collision_free(path[anchor], path[j], obstacles, clearance)) {
        next = j;
        break;
      }
    }
    out.push_back(path[next]);
    anchor = next;
  }
  return out;
}

Vec3 bspline_point(std::span<const Vec3> control, double u) {
  const int m = static_cast<int>(control.size());
  if (m == 0) throw std::invalid_argument("B-spline needs control points");
  if (m == 1) return control.front();
  const int p = std::min(3, m - 1);
  // Clamped uniform knots: p+1 zeros, m-p-1 interior, p+1 ones.
  std::vector<double> knots(m + p + 1);
  for (int i = 0; i <= p; ++i) {
    knots[i] = 0.0;
    knots[m + i] = 1.0;
  }
  for (int i = 1; i < m - p; ++i) knots[p + i] = static_cast<double>(i) / (m - p);

  u = std::clamp(u, 0.0, 1.0);
  int span = p;
  while (span < m - 1 && u >= knots[span + 1]) ++span;

  // de Boor.
  std::vector<Vec3> d(p + 1);
  for (int j = 0; j <= p; ++j) d[j] = control[span - p + j];
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const int i = span - p + j;
      const double den = knots[i + p - r + 1] - knots[i];
      const double a = den > 0.0 ? (u - knots[i]) / den : 0.0;
      d[j] = (1.0 - a) * d[j - 1] + a * d[j];
    }
  }
  return d[p];
}

WorkspacePath bspline_smooth(std::span<const Vec3> waypoints, std::size_t n_samples,
                             std::span<const SphereObstacle> obstacles, double clearance) {
  if (waypoints.size() < 2) throw std::invalid_argument("smoothing needs at least 2 waypoints");
  if (n_samples < 2) throw std::invalid_argument("smoothing needs at least 2 samples");

  WorkspacePath control(waypoints.begin(), waypoints.end());
  constexpr int kMaxDensify = 6;
  for (int round = 0; round <= kMaxDensify; ++round) {
    WorkspacePath sampled = sample_spline(control, n_samples);
    if (path_collision_free(sampled, obstacles, clearance)) return sampled;
    control = subdivide(control);
  }
  if (waypoints.size() <= n_samples) return resample_keep_vertices(waypoints, n_samples);
  return resample_arc_length(waypoints, n_samples);
}

SrrtResult srrt_plan(const Vec3& start, const Vec3& goal,
                     std::span<const SphereObstacle> obstacles, const SearchSpace& space,
                     std::size_t max_iters, std::size_t n_samples, std::uint64_t seed,
                     double clearance, const RrtOptions& options) {
  SrrtResult out;
  RrtResult rrt = rrt_star(start, goal, obstacles, space, max_iters, seed, clearance, options);
  out.raw = std::move(rrt.path);
  out.iterations = rrt.iterations;
  out.tree_size = rrt.tree.size();
  out.pruned = prune_path(out.raw, obstacles, clearance);
  if (out.pruned.size() < 2) {
    out.smoothed = out.pruned;
  } else {
    out.smoothed = bspline_smooth(out.pruned, n_samples, obstacles, clearance);
  }
  return out;
}

}  // namespace crplan
