#pragma once

// Scenario configuration, sweep runners and their tabular output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgrape/dynamics.hpp"
#include "qgrape/fisher.hpp"
#include "qgrape/grape.hpp"

namespace qgrape::experiments {

enum class SweepAxis { Theta, OmegaHat, T0, Horizon };
std::string axis_name(SweepAxis axis);

// Robustness scans either optimize once at omega_hat and evaluate at each
// grid value taken as the true frequency (Truth), or optimize at each grid
// value taken as the design frequency and evaluate at omega_true (Design).
enum class RobustnessMode { Truth, Design };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Horizon;
  std::vector<double> values;  // strictly increasing
  RobustnessMode vary = RobustnessMode::Truth;
};

struct ScenarioConfig {
  NoiseModel noise = Dephasing{1.5707963267948966, 0.0, 0.1};
  double omega_true = 1.0;
  double omega_hat = 1.0;
  std::string probe = "plus";  // zero | plus | "r1,r2,r3"
  double horizon = 5.0;
  double dt = 0.05;
  std::string objective = "qfi";  // qfi | cfi
  std::string povm = "plus_minus";  // plus_minus | computational | trivial
  std::string controls = "xyz";     // any non-empty subset of x, y, z
  AscentConfig ascent = default_ascent();
  std::string init_file;  // schedule CSV for ascent.init = file
  std::optional<SweepSpec> sweep;
  int workers = 1;

  static AscentConfig default_ascent();

  // Throws ConfigError.
  void validate() const;
  DensityState probe_state() const;
  Povm measurement() const;
  Objective make_objective() const;
  std::vector<Mat2> generators() const;
  // Problem at the given horizon whose free Hamiltonian uses frequency x.
  EstimationProblem problem(double x, double horizon) const;
  // Ascent settings with dt folded in and ascent.init_file loaded.
  AscentConfig ascent_config() const;

  // Canonical `key = value` listing; parses back to an equal config.
  std::string snapshot() const;
};

// Applies one `key = value` setting. Throws ConfigError on unknown keys or
// malformed values.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);

ScenarioConfig parse_config(std::istream& in, const std::string& origin);
ScenarioConfig load_config(const std::filesystem::path& path);

// Accepts plain numbers and multiples of pi: "pi", "pi/2", "0.25*pi", "3pi/4".
double parse_real(const std::string& text);

struct PointResult {
  double axis = 0.0;
  double horizon = 0.0;
  double qfi = 0.0;
  double cfi = 0.0;
  double oracle_qfi = 0.0;
  double uncontrolled_qfi = 0.0;
  std::vector<double> extras;  // aligned with RunRecord::extra_columns
  bool ok = true;
  std::string error;
  std::optional<ControlGrid> schedule;
};

struct RunRecord {
  std::string kind;  // theta_sweep | time_scan | robustness_scan | pulse_scan
  ScenarioConfig config;
  std::vector<std::string> extra_columns;
  std::vector<PointResult> points;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// For every theta: optimized QFI with probes |0> and |+>, the uncontrolled
// QFI (best of the two probes) and the unitary reference T^2.
RunRecord run_theta_sweep(const ScenarioConfig& config);
// Re-optimizes independently at every horizon on the grid.
RunRecord run_time_scan(const ScenarioConfig& config);
RunRecord run_robustness_scan(const ScenarioConfig& config);
// Single-pulse closed forms over t0: parallel dephasing (theta = 0) or
// spontaneous emission with gamma_plus = 0.
RunRecord run_pulse_scan(const ScenarioConfig& config);
// Dispatches on config.sweep->axis.
RunRecord run_sweep(const ScenarioConfig& config);

// (t_j, E(t_j)) for j = 0..m, E(t_j) = dt sum_{i<=j} sum_k V_k(i)^2.
std::vector<std::pair<double, double>> energy_cost(const ControlGrid& grid);

// printf "%.12g".
std::string format_number(double value);

std::vector<std::string> csv_header(const RunRecord& record);
void write_csv(std::ostream& out, const RunRecord& record);
// Checks header and field count/format of a sweep CSV; throws
// ValidationError describing the first defect.
void validate_csv(std::istream& in, const std::string& axis_column,
                  const std::vector<std::string>& extra_columns);

void write_schedule(std::ostream& out, const ControlGrid& grid);
ControlGrid read_schedule(std::istream& in, double dt);
ControlGrid load_schedule(const std::filesystem::path& path, double dt);

std::string manifest_text(const RunRecord& record);

// Writes <kind>.csv, manifest.txt and schedules/point_NNN.csv into dir.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace qgrape::experiments
