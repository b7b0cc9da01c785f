#include "crplan/benchmark.hpp"
#include "crplan/report.hpp"
#include "crplan/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kPlannerFailure = 1;
constexpr int kInputError = 2;

int cmd_validate(const std::string& file) {
  const crplan::Scenario s = crplan::load_scenario(file);
  std::cout << file << ": ok (" << s.name << ", planner " << crplan::planner_name(s.planner)
            << ", " << s.obstacles.size() << " obstacles)\n";
  return kOk;
}

int cmd_run(const std::string& file, const std::string& out, std::optional<std::uint64_t> seed,
            const std::string& planner) {
  crplan::Scenario s = crplan::load_scenario(file);
  if (seed) s.rng_seed = *seed;
  if (!planner.empty()) {
    const auto kind = crplan::parse_planner(planner);
    if (!kind) throw crplan::ValidationError("unknown planner '" + planner + "'");
    s.planner = *kind;
  }
  const crplan::RunReport r = crplan::run_scenario(s);
  if (!out.empty()) crplan::emit_csv(r, out);

  std::printf("scenario   %s\nplanner    %s\nseed       %llu\n", r.scenario_name.c_str(),
              crplan::planner_name(r.planner), static_cast<unsigned long long>(r.seed));
  std::printf("outcome    %s (%s) after %zu steps\n", r.outcome.succeeded ? "success" : "failure",
              crplan::failure_name(r.outcome.failure_reason), r.outcome.steps_taken);
  std::printf("path       %zu points, %.6f s\n", r.path_points, r.timings.path_planning);
  std::printf("motion     %.6f s\n", r.timings.motion_planning);
  if (!r.trajectory.steps.empty()) {
    std::printf("clearance  min %.4f mm\ntracking   max %.4f mm, final %.4f mm\n",
                r.trajectory.min_clearance(), r.trajectory.max_tracking_error(),
                r.trajectory.steps.back().tracking_error);
  }
  return r.outcome.succeeded ? kOk : kPlannerFailure;
}

int cmd_bench(const std::vector<std::string>& files, std::size_t reps, const std::string& out,
              const std::vector<std::string>& planners, std::uint64_t first_seed) {
  std::vector<crplan::Scenario> scenarios;
  for (const auto& f : files) scenarios.push_back(crplan::load_scenario(f));
  crplan::BenchmarkSpec spec;
  spec.repetitions = reps;
  for (std::size_t i = 0; i < reps; ++i) spec.seeds.push_back(first_seed + i);
  for (const auto& p : planners) {
    const auto kind = crplan::parse_planner(p);
    if (!kind) throw crplan::ValidationError("unknown planner '" + p + "'");
    spec.planners.push_back(*kind);
  }
  const auto cells = crplan::benchmark(scenarios, spec);
  const std::string table = crplan::format_table(cells);
  std::cout << table;
  if (!out.empty()) {
    std::ofstream t(out);
    std::ofstream j(out + ".json");
    if (!t || !j) throw crplan::IoError(out + ": cannot open for writing");
    t << table;
    j << crplan::to_json(cells) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuum manipulator path and motion planning"};
  app.require_subcommand(1);

  std::string file, out, planner;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", file, "Scenario file")->required();
  run->add_option("--out", out, "Per-step CSV output");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--planner", planner,
                  "avoidance, no_avoidance, random_nullspace or cspace_rrt_star");

  std::vector<std::string> files, planners;
  std::size_t reps = 1;
  std::uint64_t first_seed = 1;
  auto* bench = app.add_subcommand("bench", "Repeat scenarios and summarize timings");
  bench->add_option("scenarios", files, "Scenario files")->required();
  bench->add_option("--reps", reps, "Repetitions per scenario and planner")
      ->required()
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", out, "Table output; JSON goes to <out>.json");
  bench->add_option("--planners", planners, "Planners to compare (default: the scenario's)");
  bench->add_option("--seed", first_seed, "Seed of the first repetition");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", file, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*run) return cmd_run(file, out, seed, planner);
    if (*bench) return cmd_bench(files, reps, out, planners, first_seed);
    if (*validate) return cmd_validate(file);
  } catch (const crplan::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const crplan::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kInputError;
  } catch (const crplan::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
