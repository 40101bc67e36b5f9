// Adjoint gradient kernel.
//
// Backward pass (sequential, O(m)):
//   a_m = Tr(A .), b_m = Tr(B .), c_m = 0
//   a_{j-1} = a_j E_j,  b_{j-1} = b_j E_j,  c_{j-1} = (c_j + b_j [dH0, .]) E_j
// so that a_j = Tr(A D_{j+1}^m .), b_j likewise with B, and
// c_j = sum_{i>j} Tr(B D_{i+1}^m [dH0, D_{j+1}^i .]).
// Every (j, k) entry is then O(1) given the co-states and is evaluated in an
// OpenMP loop; entries are independent, so results do not depend on the
// thread count.

#include <vector>

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape {

GradientTable gradient(const Trajectory& traj, const EstimationProblem& problem,
                       const Objective& objective, StepDerivative mode) {
  const std::size_t m = traj.steps();
  const std::size_t p = problem.controls();
  const double dt = traj.dt;
  const ObjectiveWeights w = objective_weights(traj, objective);
  const Superoperator& hx = traj.dh0_commutator;

  std::vector<CoVec4> a(m + 1), b(m + 1), c(m + 1);
  a[m] = trace_functional(w.second);
  b[m] = trace_functional(w.first);
  c[m] = CoVec4::Zero();
  for (std::size_t j = m; j >= 1; --j) {
    const Superoperator& e = traj.step_propagators[j - 1];
    a[j - 1] = a[j] * e;
    b[j - 1] = b[j] * e;
    c[j - 1] = (c[j] + b[j] * hx) * e;
  }

  std::vector<Superoperator> kx(p);
  for (std::size_t k = 0; k < p; ++k) {
    kx[k] = commutator_superop_unchecked(problem.control_generators[k]);
  }

  GradientTable table{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(p))};
  const auto entries = static_cast<std::ptrdiff_t>(m * p);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < entries; ++idx) {
    const std::size_t j = static_cast<std::size_t>(idx) / p + 1;
    const std::size_t k = static_cast<std::size_t>(idx) % p;
    cplx value;
    if (mode == StepDerivative::FirstOrder) {
      const Vec4 krho = kx[k] * vectorize(traj.states[j]);
      const Vec4 kphi = kx[k] * vectorize(traj.phi[j]);
      value = kI * dt * (a[j] * krho)(0, 0) -
              2.0 * dt * dt * (b[j] * kphi + c[j] * krho)(0, 0);
    } else {
      const Superoperator g = expm_frechet(dt * traj.liouvillians[j - 1], -kI * dt * kx[k]);
      const Vec4 seed = g * vectorize(traj.states[j - 1]);
      const Vec4 phi_seed = g * vectorize(traj.phi[j - 1]) + hx * seed;
      value = -(a[j] * seed)(0, 0) - 2.0 * kI * dt * (b[j] * phi_seed + c[j] * seed)(0, 0);
    }
    table.values(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k)) = value.real();
  }
  return table;
}

}  // namespace qgrape
