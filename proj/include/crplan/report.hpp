#pragma once

#include "crplan/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace crplan {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header for a run with `obstacle_count` obstacles.
std::vector<std::string> csv_header(std::size_t obstacle_count);

/// One row per step, header first. Values round-trip exactly.
void write_csv(const RunReport& report, std::ostream& out);

/// Throws IoError when the file cannot be written.
void emit_csv(const RunReport& report, const std::filesystem::path& out_path);

// Row as read back from a CSV file.
struct CsvRow {
  std::size_t step = 0;
  Config config;
  Vec3 ee_actual = Vec3::Zero();
  Vec3 ee_expected = Vec3::Zero();
  double tracking_error = 0.0;
  std::vector<double> clearances;
  LinkId closest_link = LinkId::Rigid2;
  double g_h = 0.0;
  double g_v = 0.0;
  bool avoidance_active = false;
};

/// Inverse of write_csv. Throws IoError on a malformed table.
std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace crplan
