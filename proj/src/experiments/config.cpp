#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"

namespace qgrape::experiments {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double plain_number(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  long long v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

std::string noise_kind(const NoiseModel& noise) {
  if (std::holds_alternative<NoDissipation>(noise)) return "none";
  if (std::holds_alternative<Dephasing>(noise)) return "dephasing";
  return "spontaneous";
}

Dephasing& dephasing(ScenarioConfig& c, const std::string& key) {
  if (auto* d = std::get_if<Dephasing>(&c.noise)) return *d;
  throw ConfigError(key + " requires noise.kind = dephasing (set noise.kind first)");
}

SpontaneousEmission& emission(ScenarioConfig& c, const std::string& key) {
  if (auto* s = std::get_if<SpontaneousEmission>(&c.noise)) return *s;
  throw ConfigError(key + " requires noise.kind = spontaneous (set noise.kind first)");
}

SweepSpec& sweep(ScenarioConfig& c) {
  if (!c.sweep) c.sweep = SweepSpec{};
  return *c.sweep;
}

// sweep.start/stop/count are collected here until all three are known.
struct PendingRange {
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<long long> count;
};

std::vector<double> linspace(double start, double stop, long long count) {
  if (count < 2) throw ConfigError("sweep.count must be at least 2");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] =
        i == count - 1 ? stop
                       : start + (stop - start) * static_cast<double>(i) /
                                     static_cast<double>(count - 1);
  }
  return v;
}

// Shortest text that reads back to the same double.
std::string exact(double v) {
  char buf[64];
  for (int digits = 12; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += exact(v[i]);
  }
  return out;
}

}  // namespace

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Theta: return "theta";
    case SweepAxis::OmegaHat: return "omega_hat";
    case SweepAxis::T0: return "t0";
    case SweepAxis::Horizon: return "horizon";
  }
  return "?";
}

double parse_real(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  const auto at = text.find("pi");
  if (at == std::string::npos) return plain_number(text);
  std::string before = text.substr(0, at);
  std::string after = text.substr(at + 2);
  double factor = 1.0;
  if (!before.empty()) {
    if (before.back() == '*') before.pop_back();
    factor = before == "-" ? -1.0 : plain_number(before);
  }
  if (!after.empty()) {
    if (after.front() != '/') throw ConfigError("cannot parse '" + raw + "'");
    factor /= plain_number(after.substr(1));
  }
  return factor * std::numbers::pi;
}

AscentConfig ScenarioConfig::default_ascent() {
  AscentConfig a;
  a.step_size = 0.1;
  a.momentum = 0.9;
  a.backtracking = true;
  a.max_iterations = 1000;
  return a;
}

void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "noise.kind") {
      if (value == noise_kind(c.noise)) return;
      if (value == "none") c.noise = NoDissipation{};
      else if (value == "dephasing") c.noise = Dephasing{};
      else if (value == "spontaneous") c.noise = SpontaneousEmission{};
      else throw ConfigError("noise.kind must be none, dephasing or spontaneous");
    } else if (key == "noise.theta") {
      dephasing(c, key).theta = parse_real(value);
    } else if (key == "noise.phi") {
      dephasing(c, key).phi = parse_real(value);
    } else if (key == "noise.gamma") {
      dephasing(c, key).gamma = parse_real(value);
    } else if (key == "noise.gamma_plus") {
      emission(c, key).gamma_plus = parse_real(value);
    } else if (key == "noise.gamma_minus") {
      emission(c, key).gamma_minus = parse_real(value);
    } else if (key == "omega_true") {
      c.omega_true = parse_real(value);
    } else if (key == "omega_hat") {
      c.omega_hat = parse_real(value);
    } else if (key == "probe") {
      c.probe = value;
    } else if (key == "horizon") {
      c.horizon = parse_real(value);
    } else if (key == "dt") {
      c.dt = parse_real(value);
    } else if (key == "objective") {
      c.objective = value;
    } else if (key == "objective.povm") {
      c.povm = value;
    } else if (key == "controls") {
      c.controls = value;
    } else if (key == "workers") {
      c.workers = static_cast<int>(parse_integer(value));
    } else if (key == "ascent.step_size") {
      c.ascent.step_size = parse_real(value);
    } else if (key == "ascent.max_iterations") {
      const long long n = parse_integer(value);
      if (n < 1) throw ConfigError("ascent.max_iterations must be at least 1");
      c.ascent.max_iterations = static_cast<std::size_t>(n);
    } else if (key == "ascent.tolerance") {
      c.ascent.tolerance = parse_real(value);
    } else if (key == "ascent.patience") {
      const long long n = parse_integer(value);
      if (n < 1) throw ConfigError("ascent.patience must be at least 1");
      c.ascent.patience = static_cast<std::size_t>(n);
    } else if (key == "ascent.seed" || key == "seed") {
      const long long n = parse_integer(value);
      if (n < 0) throw ConfigError("seed must be nonnegative");
      c.ascent.seed = static_cast<std::uint64_t>(n);
    } else if (key == "ascent.init") {
      if (value == "zero") c.ascent.init = InitMode::Zero;
      else if (value == "random") c.ascent.init = InitMode::RandomUniform;
      else if (value == "file") c.ascent.init = InitMode::UserSupplied;
      else throw ConfigError("ascent.init must be zero, random or file");
    } else if (key == "ascent.init_low") {
      c.ascent.init_low = parse_real(value);
    } else if (key == "ascent.init_high") {
      c.ascent.init_high = parse_real(value);
    } else if (key == "ascent.init_file") {
      c.init_file = value;
    } else if (key == "ascent.backtracking") {
      c.ascent.backtracking = parse_bool(value);
    } else if (key == "ascent.max_halvings") {
      const long long n = parse_integer(value);
      if (n < 0) throw ConfigError("ascent.max_halvings must be nonnegative");
      c.ascent.max_halvings = static_cast<std::size_t>(n);
    } else if (key == "ascent.momentum") {
      c.ascent.momentum = parse_real(value);
    } else if (key == "ascent.derivative") {
      if (value == "exact") c.ascent.derivative = StepDerivative::Exact;
      else if (value == "first_order") c.ascent.derivative = StepDerivative::FirstOrder;
      else throw ConfigError("ascent.derivative must be exact or first_order");
    } else if (key == "sweep.axis") {
      if (value == "theta") sweep(c).axis = SweepAxis::Theta;
      else if (value == "omega_hat") sweep(c).axis = SweepAxis::OmegaHat;
      else if (value == "t0") sweep(c).axis = SweepAxis::T0;
      else if (value == "horizon") sweep(c).axis = SweepAxis::Horizon;
      else throw ConfigError("sweep.axis must be theta, omega_hat, t0 or horizon");
    } else if (key == "sweep.values") {
      std::vector<double> v;
      for (const auto& item : split(value, ',')) {
        if (item.empty()) throw ConfigError("empty entry in sweep.values");
        v.push_back(parse_real(item));
      }
      sweep(c).values = std::move(v);
    } else if (key == "sweep.vary") {
      if (value == "truth") sweep(c).vary = RobustnessMode::Truth;
      else if (value == "design") sweep(c).vary = RobustnessMode::Design;
      else throw ConfigError("sweep.vary must be truth or design");
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig c;
  PendingRange range;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "expected 'key = value'");
    try {
      if (key == "sweep.start") range.start = parse_real(value);
      else if (key == "sweep.stop") range.stop = parse_real(value);
      else if (key == "sweep.count") range.count = parse_integer(value);
      else apply_setting(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (range.start || range.stop || range.count) {
    if (!(range.start && range.stop && range.count)) {
      throw ConfigError(origin + ": sweep.start, sweep.stop and sweep.count go together");
    }
    if (c.sweep && !c.sweep->values.empty()) {
      throw ConfigError(origin + ": give either sweep.values or sweep.start/stop/count");
    }
    sweep(c).values = linspace(*range.start, *range.stop, *range.count);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

void ScenarioConfig::validate() const {
  try {
    qgrape::validate(noise);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!std::isfinite(omega_true) || !std::isfinite(omega_hat)) {
    throw ConfigError("omega_true and omega_hat must be finite");
  }
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (objective != "qfi" && objective != "cfi") throw ConfigError("objective must be qfi or cfi");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  try {
    probe_state();
    measurement();
    generators();
    ascent_config().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (ascent.init == InitMode::UserSupplied && init_file.empty()) {
    throw ConfigError("ascent.init = file needs ascent.init_file");
  }
  if (sweep) {
    if (sweep->values.empty()) throw ConfigError("sweep needs sweep.values or a range");
    for (std::size_t i = 1; i < sweep->values.size(); ++i) {
      if (!(sweep->values[i] > sweep->values[i - 1])) {
        throw ConfigError("sweep grid must be strictly increasing");
      }
    }
    const double lo = sweep->values.front();
    const double hi = sweep->values.back();
    switch (sweep->axis) {
      case SweepAxis::Theta:
        if (lo < 0.0 || hi > std::numbers::pi + 1e-12) {
          throw ConfigError("theta grid must lie in [0, pi]");
        }
        if (!std::holds_alternative<Dephasing>(noise)) {
          throw ConfigError("theta sweep needs dephasing noise");
        }
        break;
      case SweepAxis::Horizon:
        if (!(lo > 0.0)) throw ConfigError("horizon grid must be positive");
        break;
      case SweepAxis::T0:
        if (lo < 0.0 || hi > horizon + 1e-12) throw ConfigError("t0 grid must lie in [0, T]");
        break;
      case SweepAxis::OmegaHat:
        break;
    }
  }
}

DensityState ScenarioConfig::probe_state() const {
  if (probe == "plus") return DensityState::plus();
  if (probe == "zero") return DensityState::zero();
  const auto parts = split(probe, ',');
  if (parts.size() != 3) throw ConfigError("probe must be zero, plus or 'r1, r2, r3'");
  try {
    return density_from_bloch({parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2])});
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("probe: ") + e.what());
  }
}

Povm ScenarioConfig::measurement() const {
  if (povm == "plus_minus") return Povm::plus_minus();
  if (povm == "computational") return Povm::computational();
  if (povm == "trivial") return Povm::trivial();
  throw ConfigError("objective.povm must be plus_minus, computational or trivial");
}

Objective ScenarioConfig::make_objective() const {
  return objective == "cfi" ? Objective::classical(measurement()) : Objective::quantum();
}

std::vector<Mat2> ScenarioConfig::generators() const {
  if (controls.empty()) throw ConfigError("controls must name at least one axis");
  std::vector<Mat2> g;
  std::string seen;
  for (char axis : controls) {
    if (seen.find(axis) != std::string::npos) throw ConfigError("controls repeats an axis");
    seen += axis;
    if (axis == 'x') g.push_back(pauli::x());
    else if (axis == 'y') g.push_back(pauli::y());
    else if (axis == 'z') g.push_back(pauli::z());
    else throw ConfigError("controls may only contain x, y and z");
  }
  return g;
}

EstimationProblem ScenarioConfig::problem(double x, double at_horizon) const {
  return qubit_frequency_problem(x, generators(), noise, probe_state(), at_horizon);
}

AscentConfig ScenarioConfig::ascent_config() const {
  AscentConfig a = ascent;
  a.dt = dt;
  if (a.init == InitMode::UserSupplied && !a.initial_grid && !init_file.empty()) {
    a.initial_grid = load_schedule(init_file, dt);
  }
  return a;
}

std::string ScenarioConfig::snapshot() const {
  std::ostringstream out;
  out << "noise.kind = " << noise_kind(noise) << "\n";
  if (const auto* d = std::get_if<Dephasing>(&noise)) {
    out << "noise.theta = " << exact(d->theta) << "\n"
        << "noise.phi = " << exact(d->phi) << "\n"
        << "noise.gamma = " << exact(d->gamma) << "\n";
  } else if (const auto* s = std::get_if<SpontaneousEmission>(&noise)) {
    out << "noise.gamma_plus = " << exact(s->gamma_plus) << "\n"
        << "noise.gamma_minus = " << exact(s->gamma_minus) << "\n";
  }
  out << "omega_true = " << exact(omega_true) << "\n"
      << "omega_hat = " << exact(omega_hat) << "\n"
      << "probe = " << probe << "\n"
      << "horizon = " << exact(horizon) << "\n"
      << "dt = " << exact(dt) << "\n"
      << "objective = " << objective << "\n"
      << "objective.povm = " << povm << "\n"
      << "controls = " << controls << "\n"
      << "workers = " << workers << "\n"
      << "ascent.step_size = " << exact(ascent.step_size) << "\n"
      << "ascent.max_iterations = " << ascent.max_iterations << "\n"
      << "ascent.tolerance = " << exact(ascent.tolerance) << "\n"
      << "ascent.patience = " << ascent.patience << "\n"
      << "ascent.seed = " << ascent.seed << "\n"
      << "ascent.init = "
      << (ascent.init == InitMode::Zero            ? "zero"
          : ascent.init == InitMode::RandomUniform ? "random"
                                                   : "file")
      << "\n"
      << "ascent.init_low = " << exact(ascent.init_low) << "\n"
      << "ascent.init_high = " << exact(ascent.init_high) << "\n";
  if (!init_file.empty()) out << "ascent.init_file = " << init_file << "\n";
  out << "ascent.backtracking = " << (ascent.backtracking ? "true" : "false") << "\n"
      << "ascent.max_halvings = " << ascent.max_halvings << "\n"
      << "ascent.momentum = " << exact(ascent.momentum) << "\n"
      << "ascent.derivative = "
      << (ascent.derivative == StepDerivative::Exact ? "exact" : "first_order") << "\n";
  if (sweep) {
    out << "sweep.axis = " << axis_name(sweep->axis) << "\n"
        << "sweep.values = " << join_numbers(sweep->values) << "\n"
        << "sweep.vary = " << (sweep->vary == RobustnessMode::Truth ? "truth" : "design")
        << "\n";
  }
  return out.str();
}

}  // namespace qgrape::experiments
