#pragma once

// Symmetric logarithmic derivative, quantum and classical Fisher information.

#include <vector>

#include <Eigen/Dense>

#include "qgrape/dynamics.hpp"
#include "qgrape/linalg.hpp"

namespace qgrape {

inline constexpr double kDefaultSldTolerance = 1e-12;
// Outcomes rarer than this contribute nothing when their derivative is
// below kSingularDerivative; otherwise the CFI is reported as divergent.
inline constexpr double kNegligibleProbability = 1e-12;
inline constexpr double kSingularDerivative = 1e-9;

class Povm {
 public:
  // Effects must be Hermitian, PSD within 1e-10 and sum to the identity.
  explicit Povm(std::vector<Mat2> effects);

  static Povm trivial();       // {1}
  static Povm plus_minus();    // {|+><+|, |-><-|}
  static Povm computational(); // {|0><0|, |1><1|}

  const std::vector<Mat2>& effects() const { return effects_; }
  std::size_t size() const { return effects_.size(); }

 private:
  std::vector<Mat2> effects_;
};

struct SldOperator {
  Mat2 matrix;
  double rank_tolerance = kDefaultSldTolerance;
};

// Solves 2 drho = rho L + L rho in the eigenbasis of rho; components whose
// eigenvalue sum is below tol are set to zero.
SldOperator sld(const Mat2& rho, const Mat2& drho, double tol = kDefaultSldTolerance);

double qfi(const Mat2& rho, const Mat2& drho);
double qfi(const DensityState& rho, const Mat2& drho);

// Continuous extension at rank-deficient states: adds 2 d^2 lambda_s for
// every eigenvalue lambda_s dropped by the cutoff, the curvature with which
// the family leaves the pure state. Equals qfi() on full-rank states.
double qfi(const Mat2& rho, const Mat2& drho, const Mat2& d2rho);

// |dr|^2 + (r.dr)^2 / (1 - |r|^2). For |r| = 1 within 1e-9 the limit |dr|^2
// is used and r.dr must vanish within 1e-8 (InconsistentInputError otherwise).
double qfi_bloch(const BlochVector& r, const Eigen::Vector3d& dr);

// sum_y (d p_y)^2 / p_y with p_y = Tr(rho E_y), d p_y = Tr(drho E_y).
double cfi(const Mat2& rho, const Mat2& drho, const Povm& povm);
// Negligible outcomes contribute their limit 2 d^2 p_y instead of 0.
double cfi(const Mat2& rho, const Mat2& drho, const Mat2& d2rho, const Povm& povm);

struct OutcomeStatistics {
  std::vector<double> probabilities;
  std::vector<double> derivatives;
};
OutcomeStatistics outcome_statistics(const Mat2& rho, const Mat2& drho, const Povm& povm);

// -i dt Phi_m: the first-order parameter derivative of the final state.
Mat2 terminal_derivative(const Trajectory& traj);
// -2 dt^2 Psi_m
Mat2 terminal_second_derivative(const Trajectory& traj);

}  // namespace qgrape
