#include "crplan/baselines.hpp"

#include "crplan/kinematics.hpp"
#include "crplan/proximity.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace crplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shortest signed difference b - a, wrist coordinates taken modulo 2*pi.
Vec4 config_delta(const Config& a, const Config& b) {
  Vec4 d = b.vec() - a.vec();
  for (int i : {1, 3}) {
    d[i] = std::remainder(d[i], kTwoPi);
  }
  return d;
}

struct CNode {
  Config q;
  std::optional<std::size_t> parent;
  double cost = 0.0;
};

// Bucket grid over [0, pi] x [0, 2pi) x [0, pi] x [0, 2pi); wrist axes wrap.
class ConfigGrid {
 public:
  explicit ConfigGrid(double cell) {
    const std::array<double, 4> extent{kPi, kTwoPi, kPi, kTwoPi};
    for (int i = 0; i < 4; ++i) {
      dims_[i] = std::max(1, static_cast<int>(std::ceil(extent[i] / cell)));
      size_[i] = extent[i] / dims_[i];
    }
    min_size_ = *std::min_element(size_.begin(), size_.end());
    buckets_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2] * dims_[3]);
    stamp_.assign(buckets_.size(), 0);
  }

  void insert(const Config& q, std::size_t idx) { buckets_[flat(cell_of(q))].push_back(idx); }

  template <class F>
  void within(const Config& q, double radius, F&& visit) {
    const int k = static_cast<int>(std::ceil(radius / min_size_));
    ++generation_;
    for_cube(cell_of(q), k, [&](std::size_t c) {
      for (std::size_t idx : buckets_[c]) visit(idx);
    });
  }

  // Index of the closest stored configuration; `dist` is the metric.
  template <class D>
  std::size_t nearest(const Config& q, D&& dist) {
    const auto center = cell_of(q);
    const int max_k = *std::max_element(dims_.begin(), dims_.end());
    std::size_t best_idx = 0;
    double best = std::numeric_limits<double>::infinity();
    ++generation_;
    for (int k = 0; k <= max_k; ++k) {
      for_shell(center, k, [&](std::size_t c) {
        for (std::size_t idx : buckets_[c]) {
          const double d = dist(idx);
          if (d < best) {
            best = d;
            best_idx = idx;
          }
        }
      });
      if (best <= k * min_size_) break;
    }
    return best_idx;
  }

 private:
  using Cell = std::array<int, 4>;

  Cell cell_of(const Config& q) const {
    const Vec4 v = q.vec();
    Cell c;
    for (int i = 0; i < 4; ++i) {
      c[i] = std::clamp(static_cast<int>(std::floor(v[i] / size_[i])), 0, dims_[i] - 1);
    }
    return c;
  }

  std::size_t flat(const Cell& c) const {
    return ((static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2]) * dims_[3] +
           c[3];
  }

  // Visits each distinct in-range cell with offsets in [-k, k]^4 once per
  // generation, filtered by `keep(offset)`.
  template <class Keep, class F>
  void for_offsets(const Cell& center, int k, Keep&& keep, F&& f) {
    Cell o;
    for (o[0] = -k; o[0] <= k; ++o[0]) {
      for (o[1] = -k; o[1] <= k; ++o[1]) {
        for (o[2] = -k; o[2] <= k; ++o[2]) {
          for (o[3] = -k; o[3] <= k; ++o[3]) {
            if (!keep(o)) continue;
            Cell c;
            bool inside = true;
            for (int i = 0; i < 4; ++i) {
              c[i] = center[i] + o[i];
              if (i % 2 == 1) {
                c[i] = ((c[i] % dims_[i]) + dims_[i]) % dims_[i];
              } else if (c[i] < 0 || c[i] >= dims_[i]) {
                inside = false;
              }
            }
            if (!inside) continue;
            const std::size_t id = flat(c);
            if (stamp_[id] == generation_) continue;
            stamp_[id] = generation_;
            f(id);
          }
        }
      }
    }
  }

  template <class F>
  void for_cube(const Cell& center, int k, F&& f) {
    for_offsets(center, k, [](const Cell&) { return true; }, f);
  }

  template <class F>
  void for_shell(const Cell& center, int k, F&& f) {
    for_offsets(center, k, [k](const Cell& o) {
      return std::max({std::abs(o[0]), std::abs(o[1]), std::abs(o[2]), std::abs(o[3])}) == k;
    }, f);
  }

  std::array<int, 4> dims_{};
  std::array<double, 4> size_{};
  double min_size_ = 0.0;
  std::vector<std::vector<std::size_t>> buckets_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

}  // namespace

const char* failure_name(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::Stalled: return "stalled";
    case FailureReason::Collision: return "collision";
    case FailureReason::IterationsExhausted: return "iterations_exhausted";
  }
  return "?";
}

RandomNullspaceResult random_nullspace_planner(std::span<const Vec3> path, const Config& q_init,
                                               std::span<const SphereObstacle> obstacles,
                                               const ManipulatorParams& params,
                                               std::uint64_t seed,
                                               const RandomNullspaceOptions& options) {
  const auto start = Clock::now();
  if (path.empty()) throw std::invalid_argument("path is empty");
  if ((end_effector(q_init, params) - path.front()).norm() > 1.0) {
    throw std::invalid_argument("initial end effector is more than 1 mm from the path start");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-options.mu_max, options.mu_max);

  RandomNullspaceResult out;
  Trajectory& traj = out.trajectory;
  traj.path.assign(path.begin(), path.end());
  Config q = q_init.canonical();
  traj.steps.push_back(make_step_record(q, path.front(), obstacles, params));
  if (traj.steps.front().min_clearance() <= 0.0) {
    traj.colliding = true;
    out.outcome = BaselineOutcome::failure(FailureReason::Collision, 0, seconds_since(start));
    return out;
  }
  WeightState weights_state = WeightState::at(q, params.joint_limits);

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto t0 = Clock::now();
    const Vec3 p_e = path[i + 1] - path[i];
    const Vec3 p_f = corrected_task_velocity(path[i], end_effector(q, params), p_e);
    const Mat4 w = joint_limit_weights(q, weights_state, params.joint_limits);

    std::optional<Config> accepted;
    for (std::size_t attempt = 0; attempt <= options.stall_limit; ++attempt) {
      const Vec4 mu(draw(rng), draw(rng), draw(rng), draw(rng));
      const IikStep step = iik_step_biased(q, p_f, mu, w, params);
      if (config_collision_free(step.config, params, obstacles)) {
        accepted = step.config;
        break;
      }
    }
    if (!accepted) {
      out.outcome = BaselineOutcome::failure(FailureReason::Stalled, i, seconds_since(start));
      return out;
    }
    const double solve = std::chrono::duration<double>(Clock::now() - t0).count();
    StepRecord rec = make_step_record(*accepted, path[i + 1], obstacles, params);
    rec.solve_seconds = solve;
    traj.steps.push_back(std::move(rec));
    weights_state = WeightState::at(q, params.joint_limits);
    q = *accepted;
  }
  out.outcome = {true, path.size() - 1, seconds_since(start), FailureReason::None};
  return out;
}

double config_distance(const Config& a, const Config& b) {
  return config_delta(a, b).norm();
}

bool config_edge_free(const Config& a, const Config& b, std::span<const SphereObstacle> obstacles,
                      const ManipulatorParams& params, double resolution) {
  const Vec4 d = config_delta(a, b);
  const int steps = std::max(1, static_cast<int>(std::ceil(d.cwiseAbs().maxCoeff() / resolution)));
  for (int s = 1; s <= steps; ++s) {
    const Config q = Config::from_vec(a.vec() + d * (static_cast<double>(s) / steps)).canonical();
    if (!config_collision_free(q, params, obstacles)) return false;
  }
  return true;
}

CspaceRrtResult cspace_rrt_star(const Config& q_init, const Vec3& goal_position,
                                std::span<const SphereObstacle> obstacles,
                                const ManipulatorParams& params, std::size_t max_iters,
                                std::uint64_t seed, const CspaceRrtOptions& options) {
  const auto start = Clock::now();
  CspaceRrtResult out;
  const Config root = q_init.canonical();
  if (!config_collision_free(root, params, obstacles)) {
    throw std::invalid_argument("initial configuration is in collision");
  }
  auto reached = [&](const Config& q) {
    return (end_effector(q, params) - goal_position).norm() < options.goal_tolerance;
  };
  if (reached(root)) {
    out.path = {root};
    out.tree_size = 1;
    out.outcome = {true, 0, seconds_since(start), FailureReason::None};
    return out;
  }

  std::vector<CNode> tree{{root, std::nullopt, 0.0}};
  ConfigGrid grid(options.rewire_cap);
  grid.insert(root, 0);
  std::vector<std::vector<std::size_t>> children(1);
  auto propagate = [&](std::size_t from) {
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      for (std::size_t c : children[n]) {
        tree[c].cost = tree[n].cost + config_distance(tree[n].q, tree[c].q);
        stack.push_back(c);
      }
    }
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bend(0.0, kPi);
  std::uniform_real_distribution<double> wrist(0.0, kTwoPi);
  // gamma for a 4-D ball over the joint box, same form as the workspace search.
  const double volume = kPi * kTwoPi * kPi * kTwoPi;
  const double unit_ball = kPi * kPi / 2.0;
  const double gamma = 2.0 * std::pow(1.25, 0.25) * std::pow(volume / unit_ball, 0.25);
  std::optional<std::size_t> goal_node;

  std::size_t it = 0;
  for (; it < max_iters && !goal_node; ++it) {
    const Config sample{bend(rng), wrist(rng), bend(rng), wrist(rng)};

    const std::size_t near_idx =
        grid.nearest(sample, [&](std::size_t i) { return config_distance(tree[i].q, sample); });
    const double best = config_distance(tree[near_idx].q, sample);
    if (best == 0.0) continue;
    const Vec4 dir = config_delta(tree[near_idx].q, sample);
    const Config q_new =
        Config::from_vec(tree[near_idx].q.vec() + dir * std::min(1.0, options.step / best))
            .canonical();
    if (!config_edge_free(tree[near_idx].q, q_new, obstacles, params, options.edge_resolution)) {
      continue;
    }

    const double n = static_cast<double>(tree.size() + 1);
    const double radius = std::max(options.step,
                                   std::min(options.rewire_cap,
                                            gamma * std::pow(std::log(n) / n, 0.25)));
    std::vector<std::size_t> neighbors;
    grid.within(q_new, radius, [&](std::size_t i) {
      if (config_distance(tree[i].q, q_new) <= radius) neighbors.push_back(i);
    });
    std::sort(neighbors.begin(), neighbors.end());
    std::size_t parent = near_idx;
    double cost = tree[near_idx].cost + config_distance(tree[near_idx].q, q_new);
    for (std::size_t i : neighbors) {
      const double c = tree[i].cost + config_distance(tree[i].q, q_new);
      if (c < cost &&
          config_edge_free(tree[i].q, q_new, obstacles, params, options.edge_resolution)) {
        parent = i;
        cost = c;
      }
    }
    const std::size_t new_idx = tree.size();
    tree.push_back({q_new, parent, cost});
    grid.insert(q_new, new_idx);
    children.emplace_back();
    children[parent].push_back(new_idx);
    for (std::size_t i : neighbors) {
      if (i == parent) continue;
      const double c = cost + config_distance(q_new, tree[i].q);
      if (c < tree[i].cost &&
          config_edge_free(q_new, tree[i].q, obstacles, params, options.edge_resolution)) {
        auto& siblings = children[*tree[i].parent];
        siblings.erase(std::find(siblings.begin(), siblings.end(), i));
        children[new_idx].push_back(i);
        tree[i].parent = new_idx;
        tree[i].cost = c;
        propagate(i);
      }
    }
    if (reached(q_new)) goal_node = new_idx;
  }

  out.tree_size = tree.size();
  if (!goal_node) {
    out.outcome =
        BaselineOutcome::failure(FailureReason::IterationsExhausted, it, seconds_since(start));
    return out;
  }
  for (std::optional<std::size_t> cur = goal_node; cur; cur = tree[*cur].parent) {
    out.path.push_back(tree[*cur].q);
  }
  std::reverse(out.path.begin(), out.path.end());
  out.outcome = {true, it, seconds_since(start), FailureReason::None};
  return out;
}

}  // namespace crplan
