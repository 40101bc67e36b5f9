// Serial reference kernels. Kept deliberately naive: every gradient entry
// is assembled from freshly built M-operators, and every finite-difference
// entry re-propagates in order.

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape::reference {

GradientTable gradient(const Trajectory& traj, const EstimationProblem& problem,
                       const Objective& objective, StepDerivative mode) {
  const std::size_t m = traj.steps();
  const std::size_t p = problem.controls();
  const ObjectiveWeights w = objective_weights(traj, objective);
  const double dt = traj.dt;

  GradientTable table{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(p))};
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      const MOperators ops = m_operators(traj, problem, j, k, mode);
      const cplx value = dt * (w.second * ops.m1).trace() -
                         2.0 * dt * dt * (w.first * (ops.m2 + ops.m3)).trace();
      table.values(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k)) = value.real();
    }
  }
  return table;
}

GradientTable finite_difference_gradient(const EstimationProblem& problem,
                                         const ControlGrid& grid, const Objective& objective,
                                         double delta) {
  if (!(delta > 0.0)) throw ValidationError("finite difference step must be positive");
  GradientTable table{Eigen::MatrixXd::Zero(grid.amplitudes().rows(), grid.amplitudes().cols())};
  for (Eigen::Index j = 0; j < grid.amplitudes().rows(); ++j) {
    for (Eigen::Index k = 0; k < grid.amplitudes().cols(); ++k) {
      ControlGrid up = grid;
      ControlGrid down = grid;
      up.amplitudes()(j, k) += delta;
      down.amplitudes()(j, k) -= delta;
      const double f_up = objective.evaluate(propagate(problem, up));
      const double f_down = objective.evaluate(propagate(problem, down));
      table.values(j, k) = (f_up - f_down) / (2.0 * delta);
    }
  }
  return table;
}

}  // namespace qgrape::reference
