#pragma once

#include "crplan/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

namespace crplan::test {

inline std::filesystem::path source_dir() { return CRPLAN_SOURCE_DIR; }

inline std::filesystem::path scenario_path(const std::string& name) {
  return source_dir() / "scenarios" / (name + ".scenario");
}

// Frozen fixtures written by tests/oracles/generate.py.
inline const nlohmann::json& oracles() {
  static const nlohmann::json data = [] {
    std::ifstream in(source_dir() / "tests" / "oracles" / "oracles.json");
    return nlohmann::json::parse(in);
  }();
  return data;
}

inline Vec3 vec3(const nlohmann::json& j) {
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Config config(const nlohmann::json& j) {
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline Config random_config(std::mt19937_64& rng, double margin = 0.05) {
  std::uniform_real_distribution<double> bend(margin, kPi - margin);
  std::uniform_real_distribution<double> wrist(0.0, kTwoPi);
  return {bend(rng), wrist(rng), bend(rng), wrist(rng)};
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

// Central differences written out here so the check does not lean on the
// library's own finite-difference helper.
inline Mat34 central_differences(const std::function<Vec3(const Config&)>& f, const Config& q,
                                 double h = 1e-6) {
  Mat34 j;
  for (int i = 0; i < 4; ++i) {
    Vec4 plus = q.vec();
    Vec4 minus = q.vec();
    plus[i] += h;
    minus[i] -= h;
    j.col(i) = (f(Config::from_vec(plus)) - f(Config::from_vec(minus))) / (2.0 * h);
  }
  return j;
}

// Largest entrywise error relative to the largest entry of the reference.
inline double relative_error(const Mat34& a, const Mat34& reference) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), 1e-12);
  return (a - reference).cwiseAbs().maxCoeff() / scale;
}

}  // namespace crplan::test
