#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"

namespace qgrape::experiments {

namespace {

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> names = {
      "qfi", "qfi_per_t", "qfi_per_t2", "cfi", "oracle_qfi", "uncontrolled_qfi"};
  return names;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) fields.push_back(item);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool is_number(const std::string& field) {
  if (field == "nan" || field == "inf" || field == "-inf") return true;
  if (field.empty()) return false;
  char* end = nullptr;
  std::strtod(field.c_str(), &end);
  return end == field.c_str() + field.size();
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::vector<std::string> csv_header(const RunRecord& record) {
  std::vector<std::string> h;
  h.push_back(record.config.sweep ? axis_name(record.config.sweep->axis) : "axis");
  h.insert(h.end(), metric_columns().begin(), metric_columns().end());
  h.insert(h.end(), record.extra_columns.begin(), record.extra_columns.end());
  h.push_back("ok");
  return h;
}

void write_csv(std::ostream& out, const RunRecord& record) {
  const auto header = csv_header(record);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& p : record.points) {
    const double t = p.horizon;
    const double metrics[] = {p.qfi, p.qfi / t, p.qfi / (t * t), p.cfi, p.oracle_qfi,
                              p.uncontrolled_qfi};
    out << format_number(p.axis);
    for (double v : metrics) out << "," << format_number(v);
    for (std::size_t i = 0; i < record.extra_columns.size(); ++i) {
      out << "," << format_number(i < p.extras.size() ? p.extras[i] : std::nan(""));
    }
    out << "," << (p.ok ? 1 : 0) << "\n";
  }
}

void validate_csv(std::istream& in, const std::string& axis_column,
                  const std::vector<std::string>& extra_columns) {
  std::vector<std::string> expected{axis_column};
  expected.insert(expected.end(), metric_columns().begin(), metric_columns().end());
  expected.insert(expected.end(), extra_columns.begin(), extra_columns.end());
  expected.push_back("ok");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("CSV is empty");
  if (!line.empty() && line.back() == '\r') throw ValidationError("CSV uses CRLF line endings");
  if (split_fields(line) != expected) {
    throw ValidationError("CSV header mismatch: got '" + line + "'");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != expected.size()) {
      throw ValidationError("CSV row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(expected.size()));
    }
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      if (!is_number(fields[i])) {
        throw ValidationError("CSV row " + std::to_string(row) + " column '" + expected[i] +
                              "' is not a number: '" + fields[i] + "'");
      }
    }
    if (fields.back() != "0" && fields.back() != "1") {
      throw ValidationError("CSV row " + std::to_string(row) + ": ok must be 0 or 1");
    }
  }
  if (row == 1) throw ValidationError("CSV has no data rows");
}

void write_schedule(std::ostream& out, const ControlGrid& grid) {
  out << "step_index,t_start";
  for (std::size_t k = 0; k < grid.controls(); ++k) out << ",V_" << (k + 1);
  out << "\n";
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    out << (j + 1) << "," << format_number(static_cast<double>(j) * grid.dt());
    for (std::size_t k = 0; k < grid.controls(); ++k) out << "," << format_number(grid(j, k));
    out << "\n";
  }
}

ControlGrid read_schedule(std::istream& in, double dt) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("schedule file is empty");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "step_index" || header[1] != "t_start") {
    throw ConfigError("schedule header must be step_index,t_start,V_1..V_p");
  }
  const std::size_t p = header.size() - 2;
  for (std::size_t k = 0; k < p; ++k) {
    if (header[k + 2] != "V_" + std::to_string(k + 1)) {
      throw ConfigError("schedule column " + std::to_string(k + 3) + " must be V_" +
                        std::to_string(k + 1));
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    const std::string where = "schedule row " + std::to_string(rows.size() + 1) + ": ";
    if (fields.size() != p + 2) throw ConfigError(where + "wrong number of fields");
    std::vector<double> v;
    for (const auto& f : fields) {
      if (!is_number(f)) throw ConfigError(where + "not a number: '" + f + "'");
      v.push_back(std::strtod(f.c_str(), nullptr));
    }
    if (v[0] != static_cast<double>(rows.size() + 1)) {
      throw ConfigError(where + "step_index out of sequence");
    }
    if (std::abs(v[1] - static_cast<double>(rows.size()) * dt) > 1e-9 * std::max(1.0, v[1])) {
      throw ConfigError(where + "t_start does not match dt = " + format_number(dt));
    }
    rows.push_back(std::move(v));
  }
  if (rows.empty()) throw ConfigError("schedule has no steps");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t k = 0; k < p; ++k)
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = rows[j][k + 2];
  try {
    return ControlGrid(std::move(a), dt);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

ControlGrid load_schedule(const std::filesystem::path& path, double dt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule file '" + path.string() + "'");
  return read_schedule(in, dt);
}

}  // namespace qgrape::experiments
