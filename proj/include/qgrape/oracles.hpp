#pragma once

// Closed-form Fisher information and Bloch trajectories for the dephasing
// and spontaneous-emission qubit models, in the library's sign convention
// (free precession under x sigma_z / 2 turns (1,0,0) towards +y).

#include <Eigen/Dense>

#include "qgrape/dynamics.hpp"

namespace qgrape::oracles {

// QFI under the stationary control V_z = -omega0/2 with transverse
// dephasing: (2/g^2)(e^{-gT} + gT - 1); T^2 when g = 0.
double transverse_controlled_qfi(double gamma, double horizon);

// Bloch vector from |+> under dephasing along x with net Hamiltonian
// -(detuning/2) sigma_z:
//   r1 = e^{-gt/2} [(g/a) sinh(at/2) + cosh(at/2)]
//   r2 = -(2 detuning / a) e^{-gt/2} sinh(at/2),  r3 = 0,
// a = sqrt(g^2 - 4 detuning^2), continued to the trigonometric branch when
// a is imaginary and to its series near a = 0.
BlochVector transverse_bloch(double gamma, double detuning, double t);

// t^2 e^{-2 g t}
double parallel_free_qfi(double gamma, double t);

struct SinglePulsePlan {
  double t0 = 0.0;
  double horizon = 0.0;
  double gamma = 0.0;
  double omega0 = 1.0;
  // Frequency used to build the rotation (spontaneous emission only).
  double omega_bar = 1.0;

  void validate() const;
};

// Free evolution from |+> under parallel dephasing, a pi/2 rotation about
// y at t0, free evolution to T. Explicit three-term closed form.
double parallel_single_pulse_qfi(const SinglePulsePlan& plan);

struct BlochWithDerivative {
  BlochVector r;
  Eigen::Vector3d dr;  // d r / d omega0
};

// Final Bloch vector of the parallel single-pulse strategy and its omega0
// derivative, composed step by step.
BlochWithDerivative parallel_single_pulse_state(const SinglePulsePlan& plan);

// Free evolution under emission rates (g+, g-) and H = omega0 sigma_z / 2.
BlochVector spontaneous_free_bloch(double gamma_plus, double gamma_minus, double omega0, double t,
                                   const BlochVector& r0);

// e^{-(g+ + g-) T} T^2 for the |+> probe.
double spontaneous_free_qfi(double gamma_plus, double gamma_minus, double horizon);

// Rotation about y at t0 that returns the state to the x-y plane; decay at
// rate g = plan.gamma with g+ = 0. Everything is evaluated at the true
// frequency omega_bar (plan.omega0 is not read), and the rotation is held
// fixed while differentiating in the frequency.
BlochWithDerivative spontaneous_single_pulse_state(const SinglePulsePlan& plan);
double spontaneous_single_pulse_qfi(const SinglePulsePlan& plan);

// Bloch-space matrix of the y rotation applied at t0; its angle as well.
Eigen::Matrix3d spontaneous_pulse_rotation(const SinglePulsePlan& plan);
double spontaneous_pulse_angle(const SinglePulsePlan& plan);

}  // namespace qgrape::oracles
