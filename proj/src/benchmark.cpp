#include "crplan/benchmark.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace crplan {

SampleStats summarize(std::span<const double> samples) {
  SampleStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  for (double x : samples) s.mean += x;
  s.mean /= static_cast<double>(samples.size());
  if (samples.size() > 1) {
    for (double x : samples) s.variance += (x - s.mean) * (x - s.mean);
    s.variance /= static_cast<double>(samples.size() - 1);
  }
  return s;
}

double step_time_ratio(const Trajectory& t) {
  std::vector<double> times;
  for (std::size_t i = 1; i < t.steps.size(); ++i) times.push_back(t.steps[i].solve_seconds);
  if (times.empty()) return 0.0;
  const double worst = *std::max_element(times.begin(), times.end());
  auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
  std::nth_element(times.begin(), mid, times.end());
  double median = *mid;
  if (times.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(times.begin(), mid));
  }
  return median > 0.0 ? worst / median : 0.0;
}

std::vector<BenchmarkCell> benchmark(std::span<const Scenario> scenarios,
                                     const BenchmarkSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  std::vector<BenchmarkCell> cells;
  for (const Scenario& base : scenarios) {
    std::vector<PlannerKind> planners = spec.planners;
    if (planners.empty()) planners.push_back(base.planner);
    for (PlannerKind kind : planners) {
      BenchmarkCell cell;
      cell.scenario = base.name;
      cell.planner = kind;
      std::vector<double> path, motion, total;
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        Scenario s = base;
        s.planner = kind;
        s.rng_seed = spec.seeds.empty() ? rep + 1 : spec.seeds[rep % spec.seeds.size()];
        const RunReport r = run_scenario(s);
        ++cell.runs;
        if (r.outcome.succeeded) ++cell.successes;
        path.push_back(r.timings.path_planning);
        motion.push_back(r.timings.motion_planning);
        total.push_back(r.timings.total());
        if (kind != PlannerKind::CspaceRrtStar) {
          cell.worst_step_ratio = std::max(cell.worst_step_ratio, step_time_ratio(r.trajectory));
        }
      }
      cell.path_time = summarize(path);
      cell.motion_time = summarize(motion);
      cell.total_time = summarize(total);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string format_table(std::span<const BenchmarkCell> cells) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "scenario" << std::setw(18) << "planner" << std::right
     << std::setw(8) << "success" << std::setw(15) << "path_mean_s" << std::setw(15)
     << "path_var" << std::setw(15) << "motion_mean_s" << std::setw(15) << "motion_var"
     << std::setw(15) << "total_mean_s" << std::setw(15) << "total_var" << '\n';
  for (const auto& c : cells) {
    std::ostringstream rate;
    rate << c.successes << '/' << c.runs;
    os << std::left << std::setw(16) << c.scenario << std::setw(18) << planner_name(c.planner)
       << std::right << std::setw(8) << rate.str() << std::scientific << std::setprecision(4);
    for (const SampleStats* s : {&c.path_time, &c.motion_time, &c.total_time}) {
      os << std::setw(15) << s->mean << std::setw(15) << s->variance;
    }
    os << std::defaultfloat << '\n';
  }
  return os.str();
}

std::string to_json(std::span<const BenchmarkCell> cells) {
  auto stats = [](const SampleStats& s) {
    return nlohmann::json{{"mean", s.mean}, {"variance", s.variance}, {"count", s.count}};
  };
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cells) {
    out.push_back({{"scenario", c.scenario},
                   {"planner", planner_name(c.planner)},
                   {"runs", c.runs},
                   {"successes", c.successes},
                   {"path_planning_s", stats(c.path_time)},
                   {"motion_planning_s", stats(c.motion_time)},
                   {"total_s", stats(c.total_time)},
                   {"worst_step_time_ratio", c.worst_step_ratio}});
  }
  return out.dump(2);
}

}  // namespace crplan
