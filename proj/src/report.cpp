#include "crplan/report.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace crplan {

namespace {

constexpr std::size_t kFixedColumns = 16;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

LinkId parse_link(const std::string& name) {
  for (auto l : {LinkId::Continuum1, LinkId::Rigid1, LinkId::Continuum2, LinkId::Rigid2}) {
    if (name == link_name(l)) return l;
  }
  throw IoError("unknown link '" + name + "'");
}

}  // namespace

std::vector<std::string> csv_header(std::size_t obstacle_count) {
  std::vector<std::string> h{"step",  "theta1", "delta1", "theta2", "delta2", "ee_x",
                             "ee_y",  "ee_z",   "exp_x",  "exp_y",  "exp_z",
                             "tracking_error_mm"};
  for (std::size_t i = 0; i < obstacle_count; ++i) {
    h.push_back("clearance_obs" + std::to_string(i) + "_mm");
  }
  for (const char* c : {"closest_link", "g_h", "g_v", "avoidance_active"}) h.emplace_back(c);
  return h;
}

void write_csv(const RunReport& report, std::ostream& out) {
  const auto header = csv_header(report.obstacle_count);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < report.trajectory.steps.size(); ++k) {
    const StepRecord& s = report.trajectory.steps[k];
    out << k << ',' << s.config.theta1 << ',' << s.config.delta1 << ',' << s.config.theta2 << ','
        << s.config.delta2;
    for (const Vec3* v : {&s.ee_actual, &s.ee_expected}) {
      out << ',' << v->x() << ',' << v->y() << ',' << v->z();
    }
    out << ',' << s.tracking_error;
    for (std::size_t i = 0; i < report.obstacle_count; ++i) {
      out << ',' << (i < s.clearances.size() ? s.clearances[i] : 0.0);
    }
    out << ',' << link_name(s.closest_link) << ',' << s.g_h << ',' << s.g_v << ','
        << (s.avoidance_active ? 1 : 0) << '\n';
  }
}

void emit_csv(const RunReport& report, const std::filesystem::path& out_path) {
  std::ofstream out(out_path);
  if (!out) throw IoError(out_path.string() + ": cannot open for writing");
  write_csv(report, out);
  out.flush();
  if (!out) throw IoError(out_path.string() + ": write failed");
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  const auto header = split(line);
  if (header.size() < kFixedColumns || header.front() != "step") throw IoError("bad CSV header");
  const std::size_t n_obs = header.size() - kFixedColumns;
  if (header != csv_header(n_obs)) throw IoError("bad CSV header");

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != header.size()) {
      throw IoError("row " + std::to_string(rows.size() + 1) + ": expected " +
                    std::to_string(header.size()) + " columns");
    }
    try {
      CsvRow r;
      r.step = std::stoul(c[0]);
      r.config = {std::stod(c[1]), std::stod(c[2]), std::stod(c[3]), std::stod(c[4])};
      r.ee_actual = {std::stod(c[5]), std::stod(c[6]), std::stod(c[7])};
      r.ee_expected = {std::stod(c[8]), std::stod(c[9]), std::stod(c[10])};
      r.tracking_error = std::stod(c[11]);
      for (std::size_t i = 0; i < n_obs; ++i) r.clearances.push_back(std::stod(c[12 + i]));
      r.closest_link = parse_link(c[12 + n_obs]);
      r.g_h = std::stod(c[13 + n_obs]);
      r.g_v = std::stod(c[14 + n_obs]);
      r.avoidance_active = c[15 + n_obs] == "1";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("row " + std::to_string(rows.size() + 1) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace crplan
