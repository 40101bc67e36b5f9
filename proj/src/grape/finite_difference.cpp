#include <exception>

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape {

GradientTable finite_difference_gradient(const EstimationProblem& problem,
                                         const ControlGrid& grid, const Objective& objective,
                                         double delta) {
  if (!(delta > 0.0)) throw ValidationError("finite difference step must be positive");
  const Eigen::Index rows = grid.amplitudes().rows();
  const Eigen::Index cols = grid.amplitudes().cols();
  GradientTable table{Eigen::MatrixXd::Zero(rows, cols)};
  const auto entries = static_cast<std::ptrdiff_t>(rows * cols);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < entries; ++idx) {
    const Eigen::Index j = idx / cols;
    const Eigen::Index k = idx % cols;
    try {
      ControlGrid shifted = grid;
      shifted.amplitudes()(j, k) = grid.amplitudes()(j, k) + delta;
      const double f_up = objective.evaluate(propagate(problem, shifted));
      shifted.amplitudes()(j, k) = grid.amplitudes()(j, k) - delta;
      const double f_down = objective.evaluate(propagate(problem, shifted));
      table.values(j, k) = (f_up - f_down) / (2.0 * delta);
    } catch (...) {
#pragma omp critical(qgrape_fd_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

}  // namespace qgrape
