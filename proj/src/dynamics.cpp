#include "qgrape/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "qgrape/errors.hpp"

namespace qgrape {

namespace {

constexpr double kHermitianTol = 1e-12;

double min_eigenvalue(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double off = std::abs(m(0, 1));
  return 0.5 * (a + d - std::sqrt((a - d) * (a - d) + 4.0 * off * off));
}

// Lindblad term for one jump operator: J rho J^dag - {J^dag J, rho}/2.
Superoperator lindblad_term(const Mat2& jump) {
  const Mat2 id = Mat2::Identity();
  const Mat2 jdj = jump.adjoint() * jump;
  return sandwich(jump, jump.adjoint()) - 0.5 * (sandwich(jdj, id) + sandwich(id, jdj));
}

}  // namespace

DensityState::DensityState(const Mat2& matrix) : matrix_(matrix) {
  if (hermiticity_defect(matrix) > kHermitianTol) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(matrix.trace() - cplx(1.0, 0.0)) > kHermitianTol) {
    throw ValidationError("density matrix does not have unit trace");
  }
  if (min_eigenvalue(matrix) < -kPositivitySlack) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

DensityState DensityState::zero() {
  Mat2 m = Mat2::Zero();
  m(0, 0) = 1.0;
  return DensityState(m);
}

DensityState DensityState::plus() { return DensityState(Mat2::Constant(0.5)); }

DensityState DensityState::maximally_mixed() {
  return DensityState(0.5 * Mat2::Identity());
}

BlochVector bloch_from_matrix(const Mat2& rho) {
  return {(rho * pauli::x()).trace().real(), (rho * pauli::y()).trace().real(),
          (rho * pauli::z()).trace().real()};
}

BlochVector bloch_from_density(const DensityState& rho) {
  return bloch_from_matrix(rho.matrix());
}

DensityState density_from_bloch(const BlochVector& r) {
  if (r.norm() > 1.0 + kPositivitySlack) {
    throw ValidationError("Bloch vector lies outside the unit ball");
  }
  const Mat2 m =
      0.5 * (Mat2::Identity() + r.r1 * pauli::x() + r.r2 * pauli::y() + r.r3 * pauli::z());
  return DensityState(m);
}

void validate(const NoiseModel& noise) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Dephasing>) {
          if (!(n.gamma >= 0.0)) throw ValidationError("dephasing rate must be nonnegative");
        } else if constexpr (std::is_same_v<T, SpontaneousEmission>) {
          if (!(n.gamma_plus >= 0.0) || !(n.gamma_minus >= 0.0)) {
            throw ValidationError("emission rates must be nonnegative");
          }
        }
      },
      noise);
}

Superoperator dissipator(const NoiseModel& noise) {
  validate(noise);
  return std::visit(
      [](const auto& n) -> Superoperator {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NoDissipation>) {
          return Superoperator::Zero();
        } else if constexpr (std::is_same_v<T, Dephasing>) {
          const Mat2 sn = std::sin(n.theta) * std::cos(n.phi) * pauli::x() +
                          std::sin(n.theta) * std::sin(n.phi) * pauli::y() +
                          std::cos(n.theta) * pauli::z();
          return 0.5 * n.gamma * (sandwich(sn, sn) - Superoperator::Identity());
        } else {
          return n.gamma_plus * lindblad_term(pauli::raising()) +
                 n.gamma_minus * lindblad_term(pauli::lowering());
        }
      },
      noise);
}

ControlGrid::ControlGrid(Eigen::MatrixXd amplitudes, double dt)
    : amplitudes_(std::move(amplitudes)), dt_(dt) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("time step must be positive");
  if (amplitudes_.rows() < 1) throw ValidationError("control grid needs at least one step");
  if (!amplitudes_.allFinite()) throw ValidationError("control amplitudes must be finite");
}

ControlGrid ControlGrid::zeros(std::size_t steps, std::size_t controls, double dt) {
  return ControlGrid(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps),
                                           static_cast<Eigen::Index>(controls)),
                     dt);
}

std::vector<double> ControlGrid::step_amplitudes(std::size_t step) const {
  std::vector<double> v(controls());
  for (std::size_t k = 0; k < controls(); ++k) v[k] = (*this)(step, k);
  return v;
}

void EstimationProblem::validate() const {
  if (!free_hamiltonian || !free_hamiltonian_derivative) {
    throw ValidationError("estimation problem needs a free Hamiltonian and its derivative");
  }
  if (!is_hermitian(free_hamiltonian(x)) || !is_hermitian(free_hamiltonian_derivative(x))) {
    throw ValidationError("free Hamiltonian is not Hermitian");
  }
  for (const auto& h : control_generators) {
    if (!is_hermitian(h)) throw ValidationError("control generator is not Hermitian");
  }
  qgrape::validate(noise);
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
}

EstimationProblem qubit_frequency_problem(double omega, std::vector<Mat2> generators,
                                          NoiseModel noise, DensityState probe,
                                          double horizon) {
  EstimationProblem p{
      .x = omega,
      .free_hamiltonian = [](double w) -> Mat2 { return 0.5 * w * pauli::z(); },
      .free_hamiltonian_derivative = [](double) -> Mat2 { return 0.5 * pauli::z(); },
      .control_generators = std::move(generators),
      .noise = noise,
      .probe = std::move(probe),
      .horizon = horizon,
  };
  p.validate();
  return p;
}

std::vector<Mat2> xyz_controls() { return {pauli::x(), pauli::y(), pauli::z()}; }

namespace {

Superoperator liouvillian_with(const EstimationProblem& problem,
                               std::span<const double> controls, double x,
                               const Superoperator& gamma) {
  if (controls.size() != problem.controls()) {
    throw ValidationError("amplitude count does not match the number of control generators");
  }
  Mat2 h = problem.free_hamiltonian(x);
  for (std::size_t k = 0; k < controls.size(); ++k) {
    h += controls[k] * problem.control_generators[k];
  }
  return -kI * commutator_superop_unchecked(h) + gamma;
}

}  // namespace

Superoperator build_liouvillian(const EstimationProblem& problem,
                                std::span<const double> controls_at_step, double x) {
  return liouvillian_with(problem, controls_at_step, x, dissipator(problem.noise));
}

Superoperator step_propagator(const Superoperator& liouvillian, double dt) {
  if (!(dt > 0.0)) throw ValidationError("step_propagator: dt must be positive");
  return expm(dt * liouvillian);
}

Mat2 Trajectory::parameter_derivative(std::size_t j) const {
  return -kI * dt * phi.at(j);
}

Mat2 Trajectory::parameter_second_derivative(std::size_t j) const {
  return -2.0 * dt * dt * psi.at(j);
}

Trajectory Trajectory::at_rest(const DensityState& probe, const Mat2& dh0) {
  Trajectory t;
  t.states.push_back(probe.matrix());
  t.phi.push_back(Mat2::Zero());
  t.psi.push_back(Mat2::Zero());
  t.dh0_commutator = commutator_superop(dh0);
  return t;
}

Trajectory propagate_at(const EstimationProblem& problem, const ControlGrid& grid, double x) {
  if (grid.controls() != problem.controls()) {
    throw ValidationError("control grid width does not match the number of generators");
  }
  if (std::abs(grid.horizon() - problem.horizon) > 1e-9) {
    std::ostringstream msg;
    msg << "control grid covers T=" << grid.horizon() << " but the problem horizon is "
        << problem.horizon;
    throw ValidationError(msg.str());
  }
  const std::size_t m = grid.steps();
  const Superoperator gamma = dissipator(problem.noise);

  Trajectory traj;
  traj.dt = grid.dt();
  traj.dh0_commutator = commutator_superop(problem.free_hamiltonian_derivative(x));
  traj.states.reserve(m + 1);
  traj.phi.reserve(m + 1);
  traj.psi.reserve(m + 1);
  traj.liouvillians.reserve(m);
  traj.step_propagators.reserve(m);

  traj.states.push_back(problem.probe.matrix());
  traj.phi.push_back(Mat2::Zero());
  traj.psi.push_back(Mat2::Zero());

  std::vector<double> amps(grid.controls());
  Vec4 rho = vectorize(problem.probe.matrix());
  Vec4 phi = Vec4::Zero();
  Vec4 psi = Vec4::Zero();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = grid(j, k);
    Superoperator l = liouvillian_with(problem, amps, x, gamma);
    Superoperator e = expm(grid.dt() * l);
    rho = e * rho;
    const Vec4 carried = e * phi;
    phi = carried + traj.dh0_commutator * rho;
    psi = e * psi + 0.5 * traj.dh0_commutator * (phi + carried);

    const Mat2 state = devectorize(rho);
    if (min_eigenvalue(state) < -kPositivityHardFail) {
      std::ostringstream msg;
      msg << "state lost positivity at step " << (j + 1);
      throw NumericalError(msg.str(), j + 1);
    }
    traj.states.push_back(state);
    traj.phi.push_back(devectorize(phi));
    traj.psi.push_back(devectorize(psi));
    traj.liouvillians.push_back(std::move(l));
    traj.step_propagators.push_back(std::move(e));
  }
  return traj;
}

Trajectory propagate(const EstimationProblem& problem, const ControlGrid& grid) {
  return propagate_at(problem, grid, problem.x);
}

}  // namespace qgrape
