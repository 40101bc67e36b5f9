#include <algorithm>
#include <iostream>
#include <sstream>

#include "qgrape/errors.hpp"
#include "qgrape/grape.hpp"

namespace qgrape {

namespace {

constexpr double kMHermiticityTol = 1e-8;

// D_{a}^{b} = E_b ... E_a (1-based), identity when a > b.
Superoperator chain(const Trajectory& traj, std::size_t a, std::size_t b) {
  Superoperator d = Superoperator::Identity();
  for (std::size_t i = a; i <= b; ++i) d = traj.step_propagators[i - 1] * d;
  return d;
}

}  // namespace

MOperators m_operators(const Trajectory& traj, const EstimationProblem& problem, std::size_t j,
                       std::size_t k, StepDerivative mode) {
  const std::size_t m = traj.steps();
  if (j < 1 || j > m) throw ValidationError("m_operators: step index out of range");
  if (k >= problem.controls()) throw ValidationError("m_operators: control index out of range");

  const double dt = traj.dt;
  const Superoperator kx = commutator_superop_unchecked(problem.control_generators[k]);
  const Superoperator& hx = traj.dh0_commutator;
  const Superoperator to_end = chain(traj, j + 1, m);

  // The perturbation injected at step j, and the matching perturbation of
  // the Phi accumulator.
  Vec4 seed;
  Vec4 phi_seed;
  cplx scale;
  MOperators out;
  if (mode == StepDerivative::FirstOrder) {
    seed = kx * vectorize(traj.states[j]);
    phi_seed = kx * vectorize(traj.phi[j]);
    scale = 1.0;
    out.m1 = devectorize(kI * (to_end * seed));
  } else {
    const Superoperator g = expm_frechet(dt * traj.liouvillians[j - 1], -kI * dt * kx);
    seed = g * vectorize(traj.states[j - 1]);
    phi_seed = g * vectorize(traj.phi[j - 1]) + hx * seed;
    scale = kI / dt;
    out.m1 = devectorize(-(to_end * seed) / dt);
  }
  out.m2 = devectorize(scale * (to_end * phi_seed));

  Vec4 m3 = Vec4::Zero();
  Superoperator partial = Superoperator::Identity();  // D_{j+1}^{i}
  for (std::size_t i = j + 1; i <= m; ++i) {
    partial = traj.step_propagators[i - 1] * partial;
    m3 += chain(traj, i + 1, m) * (hx * (partial * seed));
  }
  out.m3 = devectorize(scale * m3);

  out.hermiticity_defect = std::max(
      {hermiticity_defect(out.m1), hermiticity_defect(out.m2), hermiticity_defect(out.m3)});
  if (out.hermiticity_defect > kMHermiticityTol) {
    std::ostringstream msg;
    msg << "qgrape: M-operators at step " << j << ", control " << k
        << " miss Hermiticity by " << out.hermiticity_defect << '\n';
    std::clog << msg.str();
  }
  return out;
}

}  // namespace qgrape
