#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"

#ifndef QGRAPE_VERSION
#define QGRAPE_VERSION "unknown"
#endif

namespace qgrape::experiments {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string manifest_text(const RunRecord& record) {
  std::ostringstream out;
  out << "# run manifest\n"
      << "kind = " << record.kind << "\n"
      << "seed = " << record.seed << "\n"
      << "points = " << record.points.size() << "\n"
      << "failed_points = "
      << std::count_if(record.points.begin(), record.points.end(),
                       [](const PointResult& p) { return !p.ok; })
      << "\n"
      << "qgrape_version = " << QGRAPE_VERSION << "\n"
      << "eigen_version = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
      << EIGEN_MINOR_VERSION << "\n"
      << "compiler = " << __VERSION__ << "\n"
#ifdef _OPENMP
      << "openmp = " << _OPENMP << "\n"
#endif
      << "finished_utc = " << utc_now() << "\n"
      << "wall_seconds = " << format_number(record.wall_seconds) << "\n";
  for (const auto& p : record.points) {
    if (!p.ok) out << "error[" << format_number(p.axis) << "] = " << p.error << "\n";
  }
  out << "\n# config snapshot\n" << record.config.snapshot();
  return out.str();
}

void write_run(const RunRecord& record, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");

  std::ostringstream csv;
  write_csv(csv, record);
  write_file(dir / (record.kind + ".csv"), csv.str());

  bool any_schedule = false;
  for (const auto& p : record.points) any_schedule = any_schedule || p.schedule.has_value();
  if (any_schedule) {
    std::filesystem::create_directories(dir / "schedules", ec);
    if (ec) throw ConfigError("cannot create schedules directory");
    for (std::size_t i = 0; i < record.points.size(); ++i) {
      if (!record.points[i].schedule) continue;
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu.csv", i);
      std::ostringstream s;
      write_schedule(s, *record.points[i].schedule);
      write_file(dir / "schedules" / name, s.str());
    }
  }
  write_file(dir / "manifest.txt", manifest_text(record));
}

}  // namespace qgrape::experiments
