#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"
#include "qgrape/oracles.hpp"

namespace qgrape::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double cfi_or_nan(const Trajectory& traj, const Povm& povm) {
  try {
    return Objective::classical(povm).evaluate(traj);
  } catch (const SingularOutcomeError&) {
    return kNaN;
  }
}

ControlGrid zero_grid(const ScenarioConfig& c, const EstimationProblem& p) {
  AscentConfig a = c.ascent_config();
  a.init = InitMode::Zero;
  a.initial_grid.reset();
  return initial_grid(p, a);
}

struct Optimized {
  ControlGrid grid;
  double objective;
  std::size_t iterations;
};

Optimized optimize(const ScenarioConfig& c, const EstimationProblem& design) {
  AscentReport r = ascend(design, c.ascent_config(), c.make_objective());
  if (r.error) {
    throw NumericalError("ascent failed at iteration " +
                         std::to_string(r.failed_iteration.value_or(0)) + ": " + *r.error);
  }
  return {std::move(r.final_grid), r.final_objective(), r.iterations_used};
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

bool transverse(const NoiseModel& noise) {
  const auto* d = std::get_if<Dephasing>(&noise);
  return d && near(std::abs(std::cos(d->theta)), 0.0);
}

bool parallel(const NoiseModel& noise) {
  const auto* d = std::get_if<Dephasing>(&noise);
  return d && near(std::abs(std::sin(d->theta)), 0.0);
}

bool pure_decay(const NoiseModel& noise) {
  const auto* s = std::get_if<SpontaneousEmission>(&noise);
  return s && s->gamma_plus == 0.0;
}

// Closed-form controlled reference for the configured model at horizon T,
// NaN where none applies.
double scenario_oracle(const ScenarioConfig& c, double horizon) {
  if (c.probe != "plus" || c.omega_true != c.omega_hat) return kNaN;
  if (transverse(c.noise)) {
    return oracles::transverse_controlled_qfi(std::get<Dephasing>(c.noise).gamma, horizon);
  }
  const bool par = parallel(c.noise);
  if (!par && !pure_decay(c.noise)) return kNaN;
  const double gamma = par ? std::get<Dephasing>(c.noise).gamma
                           : std::get<SpontaneousEmission>(c.noise).gamma_minus;
  double best = par ? oracles::parallel_free_qfi(gamma, horizon)
                    : oracles::spontaneous_free_qfi(0.0, gamma, horizon);
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const oracles::SinglePulsePlan plan{horizon * i / kSamples, horizon, gamma, c.omega_true,
                                        c.omega_hat};
    try {
      best = std::max(best, par ? oracles::parallel_single_pulse_qfi(plan)
                                : oracles::spontaneous_single_pulse_qfi(plan));
    } catch (const UndefinedRotationError&) {
    }
  }
  return best;
}

template <class Fn>
void for_each_point(RunRecord& record, Fn&& fn) {
  const long n = static_cast<long>(record.points.size());
  const std::size_t extras = record.extra_columns.size();
#pragma omp parallel for schedule(dynamic) num_threads(record.config.workers)
  for (long i = 0; i < n; ++i) {
    PointResult& p = record.points[static_cast<std::size_t>(i)];
    p.extras.assign(extras, kNaN);
    try {
      fn(p);
    } catch (const std::exception& e) {
      p.ok = false;
      p.error = e.what();
      p.qfi = p.cfi = p.oracle_qfi = p.uncontrolled_qfi = kNaN;
      p.extras.assign(extras, kNaN);
      p.schedule.reset();
    }
  }
}

RunRecord start(const ScenarioConfig& config, const std::string& kind, SweepAxis axis,
                std::vector<std::string> extras) {
  config.validate();
  if (!config.sweep || config.sweep->axis != axis) {
    throw ConfigError(kind + " needs sweep.axis = " + axis_name(axis));
  }
  RunRecord r;
  r.kind = kind;
  r.config = config;
  r.seed = config.ascent.seed;
  r.extra_columns = std::move(extras);
  for (double v : config.sweep->values) {
    PointResult p;
    p.axis = v;
    p.horizon = config.horizon;
    r.points.push_back(std::move(p));
  }
  return r;
}

template <class Fn>
RunRecord timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = fn();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

RunRecord run_theta_sweep(const ScenarioConfig& config) {
  return timed([&] {
    RunRecord r = start(config, "theta_sweep", SweepAxis::Theta,
                        {"qfi_probe_zero", "qfi_probe_plus", "uncontrolled_probe_zero",
                         "uncontrolled_probe_plus", "enhancement"});
    const Povm povm = config.measurement();
    for_each_point(r, [&](PointResult& p) {
      ScenarioConfig c = config;
      std::get<Dephasing>(c.noise).theta = p.axis;
      double best = -1.0;
      double best_uncontrolled = 0.0;
      int slot = 0;
      for (const char* probe : {"zero", "plus"}) {
        c.probe = probe;
        const Optimized o = optimize(c, c.problem(c.omega_hat, c.horizon));
        const EstimationProblem truth = c.problem(c.omega_true, c.horizon);
        const Trajectory traj = propagate(truth, o.grid);
        const double q = Objective::quantum().evaluate(traj);
        const double u = Objective::quantum().evaluate(propagate(truth, zero_grid(c, truth)));
        p.extras[slot] = q;
        p.extras[slot + 2] = u;
        ++slot;
        best_uncontrolled = std::max(best_uncontrolled, u);
        if (q > best) {
          best = q;
          p.cfi = cfi_or_nan(traj, povm);
          p.schedule = o.grid;
        }
      }
      p.qfi = best;
      p.uncontrolled_qfi = best_uncontrolled;
      p.oracle_qfi = config.horizon * config.horizon;
      p.extras[4] = best_uncontrolled > 0.0 ? best / best_uncontrolled : kNaN;
    });
    return r;
  });
}

RunRecord run_time_scan(const ScenarioConfig& config) {
  return timed([&] {
    RunRecord r = start(config, "time_scan", SweepAxis::Horizon,
                        {"uncontrolled_cfi", "objective", "iterations"});
    const Povm povm = config.measurement();
    for_each_point(r, [&](PointResult& p) {
      p.horizon = p.axis;
      const Optimized o = optimize(config, config.problem(config.omega_hat, p.horizon));
      const EstimationProblem truth = config.problem(config.omega_true, p.horizon);
      const Trajectory traj = propagate(truth, o.grid);
      const Trajectory free = propagate(truth, zero_grid(config, truth));
      p.qfi = Objective::quantum().evaluate(traj);
      p.cfi = cfi_or_nan(traj, povm);
      p.uncontrolled_qfi = Objective::quantum().evaluate(free);
      p.oracle_qfi = scenario_oracle(config, p.horizon);
      p.extras = {cfi_or_nan(free, povm), o.objective, static_cast<double>(o.iterations)};
      p.schedule = o.grid;
    });
    return r;
  });
}

RunRecord run_robustness_scan(const ScenarioConfig& config) {
  return timed([&] {
    RunRecord r = start(config, "robustness_scan", SweepAxis::OmegaHat,
                        {"design_omega", "true_omega", "design_objective", "uncontrolled_cfi"});
    const Povm povm = config.measurement();
    const bool by_truth = config.sweep->vary == RobustnessMode::Truth;
    std::optional<Optimized> shared;
    if (by_truth) shared = optimize(config, config.problem(config.omega_hat, config.horizon));
    for_each_point(r, [&](PointResult& p) {
      const double design = by_truth ? config.omega_hat : p.axis;
      const double truth_omega = by_truth ? p.axis : config.omega_true;
      const Optimized o =
          by_truth ? *shared : optimize(config, config.problem(design, config.horizon));
      const EstimationProblem truth = config.problem(truth_omega, config.horizon);
      const Trajectory traj = propagate(truth, o.grid);
      const Trajectory free = propagate(truth, zero_grid(config, truth));
      p.qfi = Objective::quantum().evaluate(traj);
      p.cfi = cfi_or_nan(traj, povm);
      p.uncontrolled_qfi = Objective::quantum().evaluate(free);
      p.oracle_qfi = design == truth_omega && config.probe == "plus" && transverse(config.noise)
                         ? oracles::transverse_controlled_qfi(
                               std::get<Dephasing>(config.noise).gamma, config.horizon)
                         : kNaN;
      p.extras = {design, truth_omega, o.objective, cfi_or_nan(free, povm)};
      p.schedule = o.grid;
    });
    return r;
  });
}

RunRecord run_pulse_scan(const ScenarioConfig& config) {
  return timed([&] {
    const bool par = parallel(config.noise);
    if (!par && !pure_decay(config.noise)) {
      throw ConfigError(
          "pulse scan needs parallel dephasing (noise.theta = 0) or spontaneous emission with "
          "noise.gamma_plus = 0");
    }
    if (config.probe != "plus") throw ConfigError("pulse scan assumes probe = plus");
    if (!par && config.omega_true != config.omega_hat) {
      throw ConfigError("spontaneous pulse scan is evaluated at omega_true = omega_hat");
    }
    RunRecord r = start(config, "pulse_scan", SweepAxis::T0, {"pulse_angle"});
    const double gamma = par ? std::get<Dephasing>(config.noise).gamma
                             : std::get<SpontaneousEmission>(config.noise).gamma_minus;
    const double free = par ? oracles::parallel_free_qfi(gamma, config.horizon)
                            : oracles::spontaneous_free_qfi(0.0, gamma, config.horizon);
    for_each_point(r, [&](PointResult& p) {
      const oracles::SinglePulsePlan plan{p.axis, config.horizon, gamma, config.omega_true,
                                          config.omega_hat};
      p.qfi = par ? oracles::parallel_single_pulse_qfi(plan)
                  : oracles::spontaneous_single_pulse_qfi(plan);
      p.cfi = kNaN;
      p.oracle_qfi = p.qfi;
      p.uncontrolled_qfi = free;
      p.extras = {par ? -std::numbers::pi / 2 : oracles::spontaneous_pulse_angle(plan)};
    });
    return r;
  });
}

RunRecord run_sweep(const ScenarioConfig& config) {
  if (!config.sweep) throw ConfigError("config has no sweep.axis");
  switch (config.sweep->axis) {
    case SweepAxis::Theta: return run_theta_sweep(config);
    case SweepAxis::Horizon: return run_time_scan(config);
    case SweepAxis::OmegaHat: return run_robustness_scan(config);
    case SweepAxis::T0: return run_pulse_scan(config);
  }
  throw ConfigError("unsupported sweep axis");
}

}  // namespace qgrape::experiments
