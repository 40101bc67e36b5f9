#pragma once

// Controlled two-level dynamics: Liouvillian assembly, piecewise-constant
// propagation and the Bloch representation.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qgrape/linalg.hpp"

namespace qgrape {

// Positivity slack for propagated states, and the point past which the
// state is rejected outright.
inline constexpr double kPositivitySlack = 1e-10;
inline constexpr double kPositivityHardFail = 1e-6;

struct BlochVector {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  Eigen::Vector3d vec() const { return {r1, r2, r3}; }
  static BlochVector from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
  double norm() const { return vec().norm(); }
};

// Validated 2x2 density matrix: Hermitian and unit trace within 1e-12,
// eigenvalues >= -1e-10.
class DensityState {
 public:
  explicit DensityState(const Mat2& matrix);

  static DensityState zero();  // |0><0|, Bloch (0,0,1)
  static DensityState plus();  // |+><+|, Bloch (1,0,0)
  static DensityState maximally_mixed();

  const Mat2& matrix() const { return matrix_; }

 private:
  Mat2 matrix_;
};

BlochVector bloch_from_density(const DensityState& rho);
BlochVector bloch_from_matrix(const Mat2& rho);
// Throws ValidationError when |r| > 1 + 1e-10.
DensityState density_from_bloch(const BlochVector& r);

struct NoDissipation {};

// (gamma/2)(sigma_n rho sigma_n - rho), n = (sin t cos p, sin t sin p, cos t)
struct Dephasing {
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
};

// gamma_plus pumps |1> -> |0>, gamma_minus decays |0> -> |1> (r3 -> -1).
struct SpontaneousEmission {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
};

using NoiseModel = std::variant<NoDissipation, Dephasing, SpontaneousEmission>;

void validate(const NoiseModel& noise);

Superoperator dissipator(const NoiseModel& noise);

class ControlGrid {
 public:
  // amplitudes is m x p: row j holds the p amplitudes of step j.
  ControlGrid(Eigen::MatrixXd amplitudes, double dt);
  static ControlGrid zeros(std::size_t steps, std::size_t controls, double dt);

  std::size_t steps() const { return static_cast<std::size_t>(amplitudes_.rows()); }
  std::size_t controls() const { return static_cast<std::size_t>(amplitudes_.cols()); }
  double dt() const { return dt_; }
  double horizon() const { return dt_ * static_cast<double>(steps()); }

  double operator()(std::size_t step, std::size_t control) const {
    return amplitudes_(static_cast<Eigen::Index>(step), static_cast<Eigen::Index>(control));
  }
  const Eigen::MatrixXd& amplitudes() const { return amplitudes_; }
  Eigen::MatrixXd& amplitudes() { return amplitudes_; }

  std::vector<double> step_amplitudes(std::size_t step) const;

 private:
  Eigen::MatrixXd amplitudes_;
  double dt_;
};

struct EstimationProblem {
  double x = 1.0;
  std::function<Mat2(double)> free_hamiltonian;
  std::function<Mat2(double)> free_hamiltonian_derivative;
  std::vector<Mat2> control_generators;
  NoiseModel noise = NoDissipation{};
  DensityState probe = DensityState::plus();
  double horizon = 1.0;

  std::size_t controls() const { return control_generators.size(); }
  // Throws ValidationError on non-Hermitian generators or bad rates.
  void validate() const;
};

// H0(x) = x sigma_z / 2 with the given control generators.
EstimationProblem qubit_frequency_problem(double omega, std::vector<Mat2> generators,
                                          NoiseModel noise, DensityState probe,
                                          double horizon);

// sigma_x, sigma_y, sigma_z as control generators.
std::vector<Mat2> xyz_controls();

// -i [H0(x) + sum_k V_k H_k, .] + Gamma
Superoperator build_liouvillian(const EstimationProblem& problem,
                                std::span<const double> controls_at_step, double x);

// exp(dt L); requires dt > 0.
Superoperator step_propagator(const Superoperator& liouvillian, double dt);

// Cached trajectory of one propagation.
//
// Phi_j = sum_{i=1}^{j} D_{i+1}^{j} [dH0, rho_i] with Phi_0 = 0 is built by
// Phi_j = E_j Phi_{j-1} + [dH0, rho_j]; the parameter derivative of rho_j
// to first order in dt is then -i dt Phi_j. The second derivative is
// -2 dt^2 Psi_j with Psi_j = E_j Psi_{j-1} + [dH0, Phi_j + E_j Phi_{j-1}] / 2.
struct Trajectory {
  double dt = 0.0;
  std::vector<Mat2> states;                   // rho_0 .. rho_m
  std::vector<Superoperator> liouvillians;    // L_1 .. L_m
  std::vector<Superoperator> step_propagators;  // exp(dt L_1) .. exp(dt L_m)
  std::vector<Mat2> phi;                      // Phi_0 .. Phi_m
  std::vector<Mat2> psi;                      // Psi_0 .. Psi_m
  Superoperator dh0_commutator = Superoperator::Zero();

  std::size_t steps() const { return step_propagators.size(); }
  const Mat2& final_state() const { return states.back(); }
  // -i dt Phi_j
  Mat2 parameter_derivative(std::size_t j) const;
  // -2 dt^2 Psi_j
  Mat2 parameter_second_derivative(std::size_t j) const;

  // Zero-step trajectory holding only the probe.
  static Trajectory at_rest(const DensityState& probe, const Mat2& dh0);
};

// Propagates the probe under the grid at the problem's own x.
Trajectory propagate(const EstimationProblem& problem, const ControlGrid& grid);
// Same, with the parameter value overridden.
Trajectory propagate_at(const EstimationProblem& problem, const ControlGrid& grid, double x);

}  // namespace qgrape
