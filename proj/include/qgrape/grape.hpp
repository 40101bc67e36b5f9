#pragma once

// Gradient ascent pulse engineering for Fisher-information objectives.
//
// Both gradients share one shape. With weights (A, B) = (L^2, L) for the
// QFI and (L2~, L1~) for the CFI, entry (j, k) is
//
//   dt Tr[A M1_j] - 2 dt^2 Tr[B (M2_j + M3_j)].
//
// StepDerivative::FirstOrder builds the M-operators from the first-order
// step derivative d exp(dt L_j)/dV_k(j) ~ -i dt [H_k, .] exp(dt L_j).
// StepDerivative::Exact substitutes the exact Frechet derivative G_jk of the
// step propagator; the M-operators become
//
//   M1_j = -D_{j+1}^m G rho_{j-1} / dt
//   M2_j =  i D_{j+1}^m (G Phi_{j-1} + [dH0, G rho_{j-1}]) / dt
//   M3_j =  i sum_{i>j} D_{i+1}^m [dH0, D_{j+1}^i G rho_{j-1}] / dt
//
// which reduce to the first-order forms as dt -> 0 and make the gradient
// exact for the discretized objective.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgrape/dynamics.hpp"
#include "qgrape/fisher.hpp"

namespace qgrape {

enum class StepDerivative { Exact, FirstOrder };

struct GradientTable {
  Eigen::MatrixXd values;  // m x p, entry (j-1, k) = dF / dV_k(j)

  std::size_t steps() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t controls() const { return static_cast<std::size_t>(values.cols()); }
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

class Objective {
 public:
  static Objective quantum();
  static Objective classical(Povm povm);

  bool is_classical() const { return povm_.has_value(); }
  const Povm& povm() const { return *povm_; }
  std::string name() const { return is_classical() ? "cfi" : "qfi"; }

  // Fisher information of the final state, continuously extended where the
  // state is rank deficient.
  double evaluate(const Trajectory& traj) const;

 private:
  std::optional<Povm> povm_;
};

// (A, B) in the gradient formula above.
struct ObjectiveWeights {
  Mat2 second;  // L^2 or L2~
  Mat2 first;   // L or L1~
};
ObjectiveWeights objective_weights(const Trajectory& traj, const Objective& objective);

struct MOperators {
  Mat2 m1;
  Mat2 m2;
  Mat2 m3;
  double hermiticity_defect = 0.0;
};

// j is 1-based (1 <= j <= m). Evaluated directly from the propagator
// products, O(m) per call. Logs to std::clog when any operator misses
// Hermiticity by more than 1e-8.
MOperators m_operators(const Trajectory& traj, const EstimationProblem& problem, std::size_t j,
                       std::size_t k, StepDerivative mode = StepDerivative::Exact);

// Backward co-state accumulation, entries evaluated in parallel.
GradientTable gradient(const Trajectory& traj, const EstimationProblem& problem,
                       const Objective& objective, StepDerivative mode = StepDerivative::Exact);
GradientTable gradient_qfi(const Trajectory& traj, const EstimationProblem& problem,
                           StepDerivative mode = StepDerivative::Exact);
GradientTable gradient_cfi(const Trajectory& traj, const EstimationProblem& problem,
                           const Povm& povm, StepDerivative mode = StepDerivative::Exact);

// Central differences, re-propagating the whole trajectory per entry.
GradientTable finite_difference_gradient(const EstimationProblem& problem,
                                         const ControlGrid& grid, const Objective& objective,
                                         double delta);

namespace reference {

// Serial O(m^2 p) evaluation through m_operators().
GradientTable gradient(const Trajectory& traj, const EstimationProblem& problem,
                       const Objective& objective, StepDerivative mode = StepDerivative::Exact);

GradientTable finite_difference_gradient(const EstimationProblem& problem,
                                         const ControlGrid& grid, const Objective& objective,
                                         double delta);

}  // namespace reference

enum class InitMode { Zero, RandomUniform, UserSupplied };

struct AscentConfig {
  double step_size = 0.01;
  std::size_t max_iterations = 1000;
  // Converged once |dF| < tolerance * max(1, |F|) for `patience`
  // consecutive iterations.
  double tolerance = 1e-8;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  InitMode init = InitMode::RandomUniform;
  double init_low = -1.0;
  double init_high = 1.0;
  std::optional<ControlGrid> initial_grid;
  double dt = 0.05;
  // Halve the step (up to max_halvings times) while it lowers the objective.
  bool backtracking = false;
  std::size_t max_halvings = 20;
  // Heavy-ball coefficient b: the step follows v <- b v + grad. b = 0 is the
  // plain update V <- V + eps grad. A halved step restarts v from grad.
  double momentum = 0.0;
  StepDerivative derivative = StepDerivative::Exact;

  void validate() const;
};

struct AscentReport {
  ControlGrid final_grid;
  std::vector<double> objective_history;  // [0] is the initial objective
  std::size_t iterations_used = 0;
  bool converged = false;
  std::optional<std::string> error;
  std::optional<std::size_t> failed_iteration;

  double final_objective() const { return objective_history.back(); }
};

ControlGrid initial_grid(const EstimationProblem& problem, const AscentConfig& config);

AscentReport ascend(const EstimationProblem& problem, const AscentConfig& config,
                    const Objective& objective);

}  // namespace qgrape
