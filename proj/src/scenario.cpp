#include "crplan/scenario.hpp"

#include "crplan/kinematics.hpp"
#include "crplan/proximity.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace crplan {

namespace {

using Clock = std::chrono::steady_clock;

std::string where(const YAML::Node& node, const std::string& field) {
  std::ostringstream os;
  os << "line " << node.Mark().line + 1 << ", field '" << field << "'";
  return os.str();
}

void check_keys(const YAML::Node& node, const std::string& context,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ParseError(where(node, context) + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ParseError(where(kv.first, context.empty() ? key : context + "." + key) +
                       ": unknown key");
    }
  }
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& context) {
  const YAML::Node child = node[key];
  if (!child) {
    throw ValidationError(where(node, context.empty() ? key : context + "." + key) +
                          ": required field is missing");
  }
  return child;
}

std::string join(const std::string& context, const std::string& key) {
  return context.empty() ? key : context + "." + key;
}

double as_double(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ParseError(where(node, field) + ": expected a number");
  }
}

std::size_t as_count(const YAML::Node& node, const std::string& field) {
  try {
    const auto v = node.as<long long>();
    if (v < 0) throw ValidationError(where(node, field) + ": must be non-negative");
    return static_cast<std::size_t>(v);
  } catch (const YAML::Exception&) {
    throw ParseError(where(node, field) + ": expected an integer");
  }
}

double as_angle(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ParseError(where(node, field) + ": expected an angle");
  const auto v = parse_angle(node.Scalar());
  if (!v) throw ParseError(where(node, field) + ": cannot read angle '" + node.Scalar() + "'");
  return *v;
}

Vec3 as_vec3(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 3) {
    throw ParseError(where(node, field) + ": expected a list of 3 numbers");
  }
  return {as_double(node[0], field), as_double(node[1], field), as_double(node[2], field)};
}

double read_double(const YAML::Node& parent, const std::string& key, const std::string& context,
                   std::optional<double> fallback = std::nullopt) {
  if (!parent[key]) {
    if (fallback) return *fallback;
    require(parent, key, context);
  }
  return as_double(parent[key], join(context, key));
}

std::size_t read_count(const YAML::Node& parent, const std::string& key,
                       const std::string& context, std::optional<std::size_t> fallback) {
  if (!parent[key]) {
    if (fallback) return *fallback;
    require(parent, key, context);
  }
  return as_count(parent[key], join(context, key));
}

ManipulatorParams read_manipulator(const YAML::Node& node) {
  ManipulatorParams p;
  if (!node) return p;
  check_keys(node, "manipulator",
             {"spring_length", "rigid_length1", "rigid_length2", "body_radius",
              "straight_threshold", "dls_threshold", "avoidance_dls_threshold",
              "theta_limits"});
  const std::string ctx = "manipulator";
  p.spring_length = read_double(node, "spring_length", ctx, p.spring_length);
  p.rigid_length1 = read_double(node, "rigid_length1", ctx, p.rigid_length1);
  p.rigid_length2 = read_double(node, "rigid_length2", ctx, p.rigid_length2);
  p.body_radius = read_double(node, "body_radius", ctx, p.body_radius);
  p.straight_threshold = read_double(node, "straight_threshold", ctx, p.straight_threshold);
  p.dls_threshold = read_double(node, "dls_threshold", ctx, p.dls_threshold);
  p.avoidance_dls_threshold =
      read_double(node, "avoidance_dls_threshold", ctx, p.avoidance_dls_threshold);
  if (const auto lim = node["theta_limits"]) {
    if (!lim.IsSequence() || lim.size() != 2) {
      throw ParseError(where(lim, "manipulator.theta_limits") + ": expected [lo, hi]");
    }
    const JointRange r{as_angle(lim[0], "manipulator.theta_limits"),
                       as_angle(lim[1], "manipulator.theta_limits")};
    p.joint_limits[0] = r;
    p.joint_limits[2] = r;
  }
  return p;
}

PathSource read_path(const YAML::Node& node) {
  if (!node.IsMap()) throw ParseError(where(node, "path") + ": expected a mapping");
  const YAML::Node type = require(node, "type", "path");
  const std::string kind = type.as<std::string>();
  if (kind == "fixed_circle") {
    check_keys(node, "path", {"type", "center", "radius", "n_points"});
    FixedCirclePath c;
    c.center = as_vec3(require(node, "center", "path"), "path.center");
    c.radius = read_double(node, "radius", "path");
    c.n_points = read_count(node, "n_points", "path", c.n_points);
    return c;
  }
  if (kind == "srrt") {
    check_keys(node, "path", {"type", "start", "goal", "space", "max_iters", "n_samples", "margin"});
    SrrtPath s;
    s.start = as_vec3(require(node, "start", "path"), "path.start");
    s.goal = as_vec3(require(node, "goal", "path"), "path.goal");
    const YAML::Node space = require(node, "space", "path");
    check_keys(space, "path.space", {"min", "max"});
    s.space.min = as_vec3(require(space, "min", "path.space"), "path.space.min");
    s.space.max = as_vec3(require(space, "max", "path.space"), "path.space.max");
    s.max_iters = read_count(node, "max_iters", "path", s.max_iters);
    s.n_samples = read_count(node, "n_samples", "path", s.n_samples);
    s.margin = read_double(node, "margin", "path", s.margin);
    return s;
  }
  throw ParseError(where(type, "path.type") + ": expected 'fixed_circle' or 'srrt'");
}

Scenario read_scenario(const YAML::Node& root) {
  check_keys(root, "",
             {"name", "manipulator", "q_init", "path", "obstacles", "gains", "planner", "seed",
              "random_nullspace", "cspace_rrt"});
  Scenario s;
  if (root["name"]) s.name = root["name"].as<std::string>();
  s.manipulator = read_manipulator(root["manipulator"]);

  const YAML::Node q = require(root, "q_init", "");
  if (!q.IsSequence() || q.size() != 4) {
    throw ParseError(where(q, "q_init") + ": expected [theta1, delta1, theta2, delta2]");
  }
  s.q_init = {as_angle(q[0], "q_init"), as_angle(q[1], "q_init"), as_angle(q[2], "q_init"),
              as_angle(q[3], "q_init")};

  s.path_source = read_path(require(root, "path", ""));

  if (const auto obs = root["obstacles"]) {
    if (!obs.IsSequence()) throw ParseError(where(obs, "obstacles") + ": expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string ctx = "obstacles[" + std::to_string(i) + "]";
      check_keys(obs[i], ctx, {"center", "radius"});
      s.obstacles.push_back({as_vec3(require(obs[i], "center", ctx), ctx + ".center"),
                             read_double(obs[i], "radius", ctx)});
    }
  }

  const YAML::Node gains = require(root, "gains", "");
  check_keys(gains, "gains", {"r", "r_max", "r_min", "k"});
  s.gains = {read_double(gains, "r", "gains"), read_double(gains, "r_max", "gains"),
             read_double(gains, "r_min", "gains"), read_double(gains, "k", "gains")};

  if (const auto pl = root["planner"]) {
    const auto kind = parse_planner(pl.as<std::string>());
    if (!kind) throw ParseError(where(pl, "planner") + ": unknown planner '" + pl.Scalar() + "'");
    s.planner = *kind;
  }
  if (root["seed"]) s.rng_seed = as_count(root["seed"], "seed");

  if (const auto rn = root["random_nullspace"]) {
    check_keys(rn, "random_nullspace", {"mu_max", "stall_limit"});
    s.random_nullspace.mu_max =
        read_double(rn, "mu_max", "random_nullspace", s.random_nullspace.mu_max);
    s.random_nullspace.stall_limit =
        read_count(rn, "stall_limit", "random_nullspace", s.random_nullspace.stall_limit);
  }
  if (const auto cs = root["cspace_rrt"]) {
    check_keys(cs, "cspace_rrt", {"max_iters", "step", "edge_resolution", "goal_tolerance"});
    s.cspace_max_iters = read_count(cs, "max_iters", "cspace_rrt", s.cspace_max_iters);
    s.cspace.step = read_double(cs, "step", "cspace_rrt", s.cspace.step);
    s.cspace.edge_resolution =
        read_double(cs, "edge_resolution", "cspace_rrt", s.cspace.edge_resolution);
    s.cspace.goal_tolerance =
        read_double(cs, "goal_tolerance", "cspace_rrt", s.cspace.goal_tolerance);
  }
  return s;
}

}  // namespace

const char* planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Avoidance: return "avoidance";
    case PlannerKind::NoAvoidance: return "no_avoidance";
    case PlannerKind::RandomNullspace: return "random_nullspace";
    case PlannerKind::CspaceRrtStar: return "cspace_rrt_star";
  }
  return "?";
}

std::optional<PlannerKind> parse_planner(const std::string& name) {
  for (auto k : {PlannerKind::Avoidance, PlannerKind::NoAvoidance, PlannerKind::RandomNullspace,
                 PlannerKind::CspaceRrtStar}) {
    if (name == planner_name(k)) return k;
  }
  return std::nullopt;
}

std::optional<double> parse_angle(const std::string& text) {
  static const std::regex number(R"(\s*[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*)");
  static const std::regex pi_form(
      R"(\s*([-+])?\s*(?:(\d+\.?\d*|\.\d+)\s*\*\s*)?pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, number)) return std::stod(text);
  if (std::regex_match(text, m, pi_form)) {
    double v = kPi;
    if (m[2].matched) v *= std::stod(m[2].str());
    if (m[3].matched) {
      const double den = std::stod(m[3].str());
      if (den == 0.0) return std::nullopt;
      v /= den;
    }
    if (m[1].matched && m[1].str() == "-") v = -v;
    return v;
  }
  return std::nullopt;
}

void Scenario::validate() const {
  try {
    manipulator.validate();
    gains.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  for (double theta : {q_init.theta1, q_init.theta2}) {
    if (!(theta >= 0.0 && theta <= kPi)) throw ValidationError("q_init bend angle outside [0, pi]");
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (!(obstacles[i].radius > 0.0)) {
      throw ValidationError("obstacles[" + std::to_string(i) + "].radius must be > 0");
    }
  }
  const Vec3 ee = end_effector(q_init, manipulator);
  if (const auto* c = std::get_if<FixedCirclePath>(&path_source)) {
    if (c->n_points < 2) throw ValidationError("path.n_points must be >= 2");
    if (!(c->radius > 0.0)) throw ValidationError("path.radius must be > 0");
  } else {
    const auto& p = std::get<SrrtPath>(path_source);
    try {
      p.space.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("path.space: ") + e.what());
    }
    if (!p.space.contains(p.start)) throw ValidationError("path.start outside path.space");
    if (!p.space.contains(p.goal)) throw ValidationError("path.goal outside path.space");
    if (p.n_samples < 2) throw ValidationError("path.n_samples must be >= 2");
    if (p.margin < 0.0) throw ValidationError("path.margin must be >= 0");
    const double clearance = manipulator.body_radius + p.margin;
    if (!point_collision_free(p.start, obstacles, clearance)) {
      throw ValidationError("path.start is within body radius + margin of an obstacle");
    }
    if (!point_collision_free(p.goal, obstacles, clearance)) {
      throw ValidationError("path.goal is within body radius + margin of an obstacle");
    }
    if ((ee - p.start).norm() > 1.0) {
      throw ValidationError("path.start is more than 1 mm from the end effector at q_init");
    }
  }
  if (!config_collision_free(q_init, manipulator, obstacles)) {
    throw ValidationError("q_init is in collision");
  }
  if (random_nullspace.mu_max < 0.0) throw ValidationError("random_nullspace.mu_max must be >= 0");
  if (!(cspace.step > 0.0 && cspace.edge_resolution > 0.0 && cspace.goal_tolerance > 0.0)) {
    throw ValidationError("cspace_rrt step, edge_resolution and goal_tolerance must be > 0");
  }
  if (cspace.edge_resolution > 0.05) {
    throw ValidationError("cspace_rrt.edge_resolution must not exceed 0.05 rad");
  }
}

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(source_name + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Scenario s;
  try {
    s = read_scenario(root);
  } catch (const ParseError& e) {
    throw ParseError(source_name + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  } catch (const YAML::Exception& e) {
    throw ParseError(source_name + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), file.string());
  if (s.name.empty()) s.name = file.stem().string();
  return s;
}

std::vector<Vec3> fixed_circle_path(const FixedCirclePath& circle, const Vec3& initial_ee) {
  const Vec3 rel = initial_ee - circle.center;
  const double phase = (rel.head<2>().norm() > 1e-12) ? std::atan2(rel.y(), rel.x()) : 0.0;
  std::vector<Vec3> path;
  path.reserve(circle.n_points);
  for (std::size_t i = 0; i < circle.n_points; ++i) {
    const double a = phase + kTwoPi * static_cast<double>(i) / (circle.n_points - 1);
    path.emplace_back(circle.center.x() + circle.radius * std::cos(a),
                      circle.center.y() + circle.radius * std::sin(a), circle.center.z());
  }
  return path;
}

RunReport run_scenario(const Scenario& s) {
  RunReport rep;
  rep.scenario_name = s.name;
  rep.planner = s.planner;
  rep.seed = s.rng_seed;
  rep.obstacle_count = s.obstacles.size();
  const ManipulatorParams& params = s.manipulator;

  auto t0 = Clock::now();
  std::vector<Vec3> path;
  if (const auto* c = std::get_if<FixedCirclePath>(&s.path_source)) {
    path = fixed_circle_path(*c, end_effector(s.q_init, params));
  } else if (s.planner != PlannerKind::CspaceRrtStar) {
    const auto& p = std::get<SrrtPath>(s.path_source);
    try {
      rep.srrt = srrt_plan(p.start, p.goal, s.obstacles, p.space, p.max_iters, p.n_samples,
                           s.rng_seed, params.body_radius + p.margin);
      path = rep.srrt->smoothed;
    } catch (const NoPathFound&) {
      rep.timings.path_planning = std::chrono::duration<double>(Clock::now() - t0).count();
      rep.outcome = BaselineOutcome::failure(FailureReason::IterationsExhausted, 0,
                                             rep.timings.path_planning);
      return rep;
    }
  }
  auto t1 = Clock::now();
  rep.timings.path_planning = std::chrono::duration<double>(t1 - t0).count();
  rep.path_points = path.size();

  try {
    switch (s.planner) {
      case PlannerKind::Avoidance:
      case PlannerKind::NoAvoidance: {
        PlannerOptions opts;
        opts.avoidance = s.planner == PlannerKind::Avoidance;
        rep.trajectory = plan_motion(path, s.q_init, s.obstacles, s.gains, params, opts);
        const double secs = std::chrono::duration<double>(Clock::now() - t1).count();
        rep.outcome = rep.trajectory.colliding
                          ? BaselineOutcome::failure(FailureReason::Collision,
                                                     rep.trajectory.steps.size() - 1, secs)
                          : BaselineOutcome{true, rep.trajectory.steps.size() - 1, secs,
                                            FailureReason::None};
        break;
      }
      case PlannerKind::RandomNullspace: {
        auto res = random_nullspace_planner(path, s.q_init, s.obstacles, params, s.rng_seed,
                                            s.random_nullspace);
        rep.trajectory = std::move(res.trajectory);
        rep.outcome = res.outcome;
        break;
      }
      case PlannerKind::CspaceRrtStar: {
        const Vec3 goal = std::holds_alternative<SrrtPath>(s.path_source)
                              ? std::get<SrrtPath>(s.path_source).goal
                              : path.back();
        auto res = cspace_rrt_star(s.q_init, goal, s.obstacles, params, s.cspace_max_iters,
                                   s.rng_seed, s.cspace);
        rep.outcome = res.outcome;
        for (const Config& q : res.path) {
          const Vec3 ee = end_effector(q, params);
          rep.trajectory.path.push_back(ee);
          rep.trajectory.steps.push_back(make_step_record(q, ee, s.obstacles, params));
        }
        rep.path_points = res.path.size();
        break;
      }
    }
  } catch (const SingularTaskError&) {
    rep.outcome = BaselineOutcome::failure(FailureReason::Stalled, rep.trajectory.steps.size(),
                                           std::chrono::duration<double>(Clock::now() - t1).count());
  }
  rep.timings.motion_planning = std::chrono::duration<double>(Clock::now() - t1).count();
  return rep;
}

}  // namespace crplan
