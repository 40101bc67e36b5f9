#include <cmath>
#include <random>
#include <sstream>

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape {

void AscentConfig::validate() const {
  if (!(step_size > 0.0)) throw ValidationError("ascent step size must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("ascent tolerance must be positive");
  if (max_iterations < 1) throw ValidationError("ascent needs at least one iteration");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must lie in [0, 1)");
  if (!(dt > 0.0)) throw ValidationError("ascent time step must be positive");
  if (init == InitMode::RandomUniform && !(init_low <= init_high)) {
    throw ValidationError("random initialization range is empty");
  }
  if (init == InitMode::UserSupplied && !initial_grid) {
    throw ValidationError("user-supplied initialization without a grid");
  }
}

ControlGrid initial_grid(const EstimationProblem& problem, const AscentConfig& config) {
  config.validate();
  if (config.init == InitMode::UserSupplied) {
    const ControlGrid& g = *config.initial_grid;
    if (g.controls() != problem.controls() ||
        std::abs(g.horizon() - problem.horizon) > 1e-9) {
      throw ValidationError("supplied control grid does not fit the problem");
    }
    return g;
  }
  const double steps_real = problem.horizon / config.dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (steps < 1 || std::abs(static_cast<double>(steps) * config.dt - problem.horizon) > 1e-9) {
    std::ostringstream msg;
    msg << "horizon " << problem.horizon << " is not a multiple of dt " << config.dt;
    throw ValidationError(msg.str());
  }
  ControlGrid grid = ControlGrid::zeros(steps, problem.controls(), config.dt);
  if (config.init == InitMode::RandomUniform) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(config.init_low, config.init_high);
    for (std::size_t j = 0; j < steps; ++j)
      for (std::size_t k = 0; k < problem.controls(); ++k)
        grid.amplitudes()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = dist(rng);
  }
  return grid;
}

AscentReport ascend(const EstimationProblem& problem, const AscentConfig& config,
                    const Objective& objective) {
  problem.validate();
  AscentReport report{initial_grid(problem, config), {}, 0, false, std::nullopt, std::nullopt};

  Trajectory traj;
  double value = 0.0;
  try {
    traj = propagate(problem, report.final_grid);
    value = objective.evaluate(traj);
  } catch (const std::exception& e) {
    report.error = e.what();
    report.failed_iteration = 0;
    return report;
  }
  report.objective_history.push_back(value);

  std::size_t quiet = 0;
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(report.final_grid.amplitudes().rows(),
                                                   report.final_grid.amplitudes().cols());
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    try {
      const GradientTable g = gradient(traj, problem, objective, config.derivative);
      if (!g.values.allFinite()) throw NumericalError("gradient has non-finite entries");

      velocity = config.momentum * velocity + g.values;
      double step = config.step_size;
      double next_value = value;
      bool accepted = false;
      for (std::size_t halving = 0; halving <= config.max_halvings; ++halving) {
        ControlGrid trial(report.final_grid.amplitudes() + step * velocity, report.final_grid.dt());
        Trajectory trial_traj = propagate(problem, trial);
        const double trial_value = objective.evaluate(trial_traj);
        if (!std::isfinite(trial_value)) throw NumericalError("objective is not finite");
        if (!config.backtracking || trial_value >= value) {
          report.final_grid = std::move(trial);
          traj = std::move(trial_traj);
          next_value = trial_value;
          accepted = true;
          break;
        }
        step *= 0.5;
        velocity = g.values;
      }

      const double change = accepted ? next_value - value : 0.0;
      value = next_value;
      report.objective_history.push_back(value);
      report.iterations_used = it;

      quiet = std::abs(change) < config.tolerance * std::max(1.0, std::abs(value)) ? quiet + 1 : 0;
      if (quiet >= config.patience) {
        report.converged = true;
        break;
      }
    } catch (const std::exception& e) {
      report.error = e.what();
      report.failed_iteration = it;
      report.converged = false;
      break;
    }
  }
  return report;
}

}  // namespace qgrape
