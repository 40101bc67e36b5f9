#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"
#include "qgrape/oracles.hpp"

namespace qgrape::cli {

namespace {

namespace fs = std::filesystem;
namespace ex = qgrape::experiments;

struct GlobalOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> dt;
  bool verbose = false;
};

std::string six(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ex::ScenarioConfig scenario(const GlobalOptions& g, bool required) {
  ex::ScenarioConfig c;
  if (!g.config.empty()) {
    c = ex::load_config(g.config);
  } else if (required) {
    throw ConfigError("this command needs --config PATH");
  }
  if (g.seed) c.ascent.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (g.dt) c.dt = *g.dt;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
}

fs::path output_dir(const GlobalOptions& g) {
  const fs::path dir = g.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

int simulate(const GlobalOptions& g, const std::string& schedule, std::ostream& out) {
  const ex::ScenarioConfig c = scenario(g, false);
  const EstimationProblem p = c.problem(c.omega_true, c.horizon);
  AscentConfig zero = c.ascent_config();
  zero.init = InitMode::Zero;
  zero.initial_grid.reset();
  const ControlGrid grid = schedule.empty() ? initial_grid(p, zero) : ex::load_schedule(schedule, c.dt);
  const Trajectory traj = propagate(p, grid);
  const BlochVector r = bloch_from_matrix(traj.final_state());
  out << "qfi = " << ex::format_number(Objective::quantum().evaluate(traj)) << "\n";
  try {
    out << "cfi = " << ex::format_number(Objective::classical(c.measurement()).evaluate(traj))
        << "\n";
  } catch (const SingularOutcomeError& e) {
    out << "cfi = nan  # " << e.what() << "\n";
  }
  out << "bloch = " << ex::format_number(r.r1) << ", " << ex::format_number(r.r2) << ", "
      << ex::format_number(r.r3) << "\n";
  if (!g.out.empty()) {
    std::ostringstream csv;
    csv << "step_index,t,r1,r2,r3\n";
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
      const BlochVector b = bloch_from_matrix(traj.states[j]);
      csv << j << "," << ex::format_number(static_cast<double>(j) * grid.dt()) << ","
          << ex::format_number(b.r1) << "," << ex::format_number(b.r2) << ","
          << ex::format_number(b.r3) << "\n";
    }
    write_text(output_dir(g) / "trajectory.csv", csv.str());
  }
  return kExitOk;
}

int optimize(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const ex::ScenarioConfig c = scenario(g, true);
  const auto t0 = std::chrono::steady_clock::now();
  const EstimationProblem design = c.problem(c.omega_hat, c.horizon);
  const AscentReport r = ascend(design, c.ascent_config(), c.make_objective());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.error) {
    err << "qgrape: ascent failed at iteration " << r.failed_iteration.value_or(0) << ": "
        << *r.error << "\n";
    return kExitNumerical;
  }
  const Trajectory traj = propagate(c.problem(c.omega_true, c.horizon), r.final_grid);
  out << "objective = " << c.objective << "\n"
      << "initial = " << ex::format_number(r.objective_history.front()) << "\n"
      << "final = " << ex::format_number(r.final_objective()) << "\n"
      << "qfi_at_truth = " << ex::format_number(Objective::quantum().evaluate(traj)) << "\n"
      << "iterations = " << r.iterations_used << "\n"
      << "converged = " << (r.converged ? "true" : "false") << "\n";
  if (!g.out.empty()) {
    const fs::path dir = output_dir(g);
    std::ostringstream s;
    ex::write_schedule(s, r.final_grid);
    write_text(dir / "schedule.csv", s.str());
    std::ostringstream h;
    h << "iteration,objective\n";
    for (std::size_t i = 0; i < r.objective_history.size(); ++i) {
      h << i << "," << ex::format_number(r.objective_history[i]) << "\n";
    }
    write_text(dir / "history.csv", h.str());
    std::ostringstream m;
    m << "# optimize manifest\nseed = " << c.ascent.seed << "\niterations = " << r.iterations_used
      << "\nconverged = " << (r.converged ? "true" : "false")
      << "\nwall_seconds = " << ex::format_number(seconds) << "\n\n# config snapshot\n"
      << c.snapshot();
    write_text(dir / "manifest.txt", m.str());
  }
  return kExitOk;
}

int sweep(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const ex::ScenarioConfig c = scenario(g, true);
  const ex::RunRecord record = ex::run_sweep(c);
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  ex::write_run(record, dir);
  std::size_t failed = 0;
  for (const auto& p : record.points) failed += p.ok ? 0 : 1;
  out << record.kind << ": " << record.points.size() << " points, " << failed << " failed, "
      << "written to " << (dir / (record.kind + ".csv")).string() << "\n";
  if (g.verbose) {
    for (const auto& p : record.points) {
      err << "  " << ex::format_number(p.axis) << "  qfi " << ex::format_number(p.qfi)
          << "  uncontrolled " << ex::format_number(p.uncontrolled_qfi)
          << (p.ok ? "" : "  FAILED: " + p.error) << "\n";
    }
  }
  return kExitOk;
}

int energy(const GlobalOptions& g, const std::string& schedule, std::ostream& out) {
  const ex::ScenarioConfig c = scenario(g, false);
  const ControlGrid grid = ex::load_schedule(schedule, c.dt);
  std::ostringstream csv;
  csv << "t,energy\n";
  for (const auto& [t, e] : ex::energy_cost(grid)) {
    csv << ex::format_number(t) << "," << ex::format_number(e) << "\n";
  }
  if (g.out.empty()) {
    out << csv.str();
  } else {
    write_text(output_dir(g) / "energy.csv", csv.str());
    out << "E(T) = " << ex::format_number(ex::energy_cost(grid).back().second) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher-information pulse optimization for a driven dissipative qubit", "qgrape"};
  app.set_version_flag("--version", QGRAPE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  int workers = 1;
  double dt = 0.0;
  app.add_option("--config", g.config, "scenario file (key = value)");
  app.add_option("--out", g.out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* workers_opt = app.add_option("--workers", workers, "parallel sweep points")
                          ->check(CLI::PositiveNumber);
  auto* dt_opt = app.add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", g.verbose, "progress and diagnostics on stderr");

  std::string schedule;
  auto* sim = app.add_subcommand("simulate", "propagate a schedule (default: no controls)");
  sim->add_option("--schedule", schedule, "schedule CSV")->check(CLI::ExistingFile);
  auto* opt = app.add_subcommand("optimize", "run gradient ascent on the configured scenario");
  auto* swp = app.add_subcommand("sweep", "run the configured sweep and write CSV + manifest");
  auto* en = app.add_subcommand("energy", "energy cost E(t) of a schedule");
  en->add_option("--schedule", schedule, "schedule CSV")->required();

  auto* orc = app.add_subcommand("oracle", "closed-form reference values");
  orc->require_subcommand(1);
  double gamma = 0.1, horizon = 1.0, t0 = 0.0, omega = 1.0, gamma_plus = 0.0;
  auto common = [&](CLI::App* s, bool pulse) {
    s->add_option("--gamma", gamma, "decay rate")->check(CLI::NonNegativeNumber);
    s->add_option("--horizon", horizon, "evolution time T")->check(CLI::NonNegativeNumber);
    if (pulse) {
      s->add_option("--t0", t0, "pulse time")->required();
      s->add_option("--omega", omega, "true frequency");
    }
  };
  auto* o_tr = orc->add_subcommand("transverse", "(2/g^2)(e^{-gT} + gT - 1)");
  common(o_tr, false);
  auto* o_pf = orc->add_subcommand("parallel", "T^2 e^{-2gT}, no controls");
  common(o_pf, false);
  auto* o_pp = orc->add_subcommand("parallel-pulse", "single pi/2 pulse at t0, parallel dephasing");
  common(o_pp, true);
  auto* o_sf = orc->add_subcommand("spontaneous", "e^{-(g+ + g-)T} T^2, no controls");
  common(o_sf, false);
  o_sf->add_option("--gamma-plus", gamma_plus, "pumping rate")->check(CLI::NonNegativeNumber);
  auto* o_sp = orc->add_subcommand("spontaneous-pulse", "single rotation at t0, decay only");
  common(o_sp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*workers_opt) g.workers = workers;
  if (*dt_opt) g.dt = dt;

  try {
    if (*sim) return simulate(g, schedule, out);
    if (*opt) return optimize(g, out, err);
    if (*swp) return sweep(g, out, err);
    if (*en) return energy(g, schedule, out);
    if (*o_tr) {
      out << six(oracles::transverse_controlled_qfi(gamma, horizon)) << "\n";
    } else if (*o_pf) {
      out << six(oracles::parallel_free_qfi(gamma, horizon)) << "\n";
    } else if (*o_sf) {
      out << six(oracles::spontaneous_free_qfi(gamma_plus, gamma, horizon)) << "\n";
    } else if (*o_pp) {
      out << six(oracles::parallel_single_pulse_qfi({t0, horizon, gamma, omega, omega})) << "\n";
    } else if (*o_sp) {
      out << six(oracles::spontaneous_single_pulse_qfi({t0, horizon, gamma, omega, omega})) << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "qgrape: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "qgrape: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qgrape: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace qgrape::cli
