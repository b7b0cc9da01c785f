#pragma once

#include "crplan/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace crplan {

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // sample variance, 0 for a single sample
  std::size_t count = 0;
};

SampleStats summarize(std::span<const double> samples);

struct BenchmarkCell {
  std::string scenario;
  PlannerKind planner = PlannerKind::Avoidance;
  std::size_t runs = 0;
  std::size_t successes = 0;
  SampleStats path_time;
  SampleStats motion_time;
  SampleStats total_time;
  // Worst max/median per-step solve time ratio over the runs (IIK planners).
  double worst_step_ratio = 0.0;
};

struct BenchmarkSpec {
  std::size_t repetitions = 1;
  std::vector<std::uint64_t> seeds;  // seed of repetition i is seeds[i % size]; empty -> 1..reps
  std::vector<PlannerKind> planners;  // empty -> each scenario's own planner
};

/// Runs every scenario under every planner for the requested repetitions.
/// Scenarios are taken as already loaded so no file I/O lands in the timings.
std::vector<BenchmarkCell> benchmark(std::span<const Scenario> scenarios,
                                     const BenchmarkSpec& spec);

/// max / median of the per-step solve times of a trajectory; 0 if empty.
double step_time_ratio(const Trajectory& t);

std::string format_table(std::span<const BenchmarkCell> cells);
std::string to_json(std::span<const BenchmarkCell> cells);

}  // namespace crplan
