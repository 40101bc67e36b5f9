#include <cmath>
#include <sstream>

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape {

Objective Objective::quantum() { return Objective{}; }

Objective Objective::classical(Povm povm) {
  Objective o;
  o.povm_ = std::move(povm);
  return o;
}

double Objective::evaluate(const Trajectory& traj) const {
  const Mat2 drho = terminal_derivative(traj);
  const Mat2 d2rho = terminal_second_derivative(traj);
  return is_classical() ? cfi(traj.final_state(), drho, d2rho, *povm_)
                        : qfi(traj.final_state(), drho, d2rho);
}

ObjectiveWeights objective_weights(const Trajectory& traj, const Objective& objective) {
  const Mat2& rho = traj.final_state();
  const Mat2 drho = terminal_derivative(traj);
  if (!objective.is_classical()) {
    const Mat2 l = sld(rho, drho).matrix;
    return {l * l, l};
  }
  const auto stats = outcome_statistics(rho, drho, objective.povm());
  ObjectiveWeights w{Mat2::Zero(), Mat2::Zero()};
  for (std::size_t y = 0; y < objective.povm().size(); ++y) {
    const double p = stats.probabilities[y];
    const double dp = stats.derivatives[y];
    if (p < kNegligibleProbability) {
      if (std::abs(dp) < kSingularDerivative) continue;
      std::ostringstream msg;
      msg << "outcome " << y << " has vanishing probability and nonzero derivative";
      throw SingularOutcomeError(msg.str());
    }
    const double score = dp / p;
    w.first += score * objective.povm().effects()[y];
    w.second += score * score * objective.povm().effects()[y];
  }
  return w;
}

GradientTable gradient_qfi(const Trajectory& traj, const EstimationProblem& problem,
                           StepDerivative mode) {
  return gradient(traj, problem, Objective::quantum(), mode);
}

GradientTable gradient_cfi(const Trajectory& traj, const EstimationProblem& problem,
                           const Povm& povm, StepDerivative mode) {
  return gradient(traj, problem, Objective::classical(povm), mode);
}

}  // namespace qgrape
