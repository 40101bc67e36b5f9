#include "qgrape/oracles.hpp"

#include <cmath>

#include "qgrape/errors.hpp"
#include "qgrape/fisher.hpp"

namespace qgrape::oracles {

namespace {

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw ValidationError(std::string(what) + " must be nonnegative");
}

}  // namespace

double transverse_controlled_qfi(double gamma, double horizon) {
  require_nonnegative(gamma, "decay rate");
  require_nonnegative(horizon, "horizon");
  const double x = gamma * horizon;
  if (x < 1e-4) {
    // (2/x^2)(e^{-x} + x - 1) = 1 - x/3 + x^2/12 - x^3/60 + ...
    return horizon * horizon * (1.0 - x / 3.0 + x * x / 12.0 - x * x * x / 60.0);
  }
  return 2.0 / (gamma * gamma) * (std::expm1(-x) + x);
}

BlochVector transverse_bloch(double gamma, double detuning, double t) {
  require_nonnegative(t, "time");
  const double h = 0.5 * t;
  const double a2 = gamma * gamma - 4.0 * detuning * detuning;
  // decay = e^{-g h}; sinhc = e^{-g h} sinh(a h)/a; cosh_part = e^{-g h} cosh(a h)
  double sinhc;
  double cosh_part;
  if (std::abs(a2) * h * h < 1e-12) {
    const double decay = std::exp(-gamma * h);
    sinhc = decay * h * (1.0 + a2 * h * h / 6.0);
    cosh_part = decay * (1.0 + a2 * h * h / 2.0);
  } else if (a2 > 0.0) {
    const double a = std::sqrt(a2);
    const double grow = std::exp((a - gamma) * h);
    const double shrink = std::exp(-(a + gamma) * h);
    sinhc = 0.5 * (grow - shrink) / a;
    cosh_part = 0.5 * (grow + shrink);
  } else {
    const double b = std::sqrt(-a2);
    const double decay = std::exp(-gamma * h);
    sinhc = decay * std::sin(b * h) / b;
    cosh_part = decay * std::cos(b * h);
  }
  return {gamma * sinhc + cosh_part, -2.0 * detuning * sinhc, 0.0};
}

double parallel_free_qfi(double gamma, double t) {
  require_nonnegative(t, "time");
  return t * t * std::exp(-2.0 * gamma * t);
}

void SinglePulsePlan::validate() const {
  if (!(horizon >= 0.0)) throw ValidationError("pulse plan horizon must be nonnegative");
  if (!(t0 >= 0.0 && t0 <= horizon)) throw ValidationError("pulse time must lie in [0, T]");
  require_nonnegative(gamma, "decay rate");
}

double parallel_single_pulse_qfi(const SinglePulsePlan& plan) {
  plan.validate();
  const double g = plan.gamma;
  const double t0 = plan.t0;
  const double big_t = plan.horizon;
  const double s2 = std::pow(std::sin(plan.omega0 * t0), 2);
  const double c2 = std::pow(std::cos(plan.omega0 * t0), 2);
  const double e_t = std::exp(-2.0 * g * big_t);
  const double e_0 = std::exp(-2.0 * g * t0);

  double f = e_0 * t0 * t0 * s2 + e_t * (t0 * t0 + big_t * (big_t - 2.0 * t0) * s2);
  const double purity_gap = 1.0 - e_t * s2 - e_0 * c2;
  if (purity_gap > 1e-14) {
    f += t0 * t0 * std::pow(e_t - e_0, 2) * s2 * c2 / purity_gap;
  }
  return f;
}

BlochWithDerivative parallel_single_pulse_state(const SinglePulsePlan& plan) {
  plan.validate();
  const double w = plan.omega0;
  const double t0 = plan.t0;
  const double rest = plan.horizon - plan.t0;

  const double d0 = std::exp(-plan.gamma * t0);
  Eigen::Vector3d r(d0 * std::cos(w * t0), d0 * std::sin(w * t0), 0.0);
  Eigen::Vector3d dr(-d0 * t0 * std::sin(w * t0), d0 * t0 * std::cos(w * t0), 0.0);

  // pi/2 about y, sense chosen so (1,0,0) -> (0,0,1)
  Eigen::Matrix3d rot;
  rot << 0, 0, -1, 0, 1, 0, 1, 0, 0;
  r = rot * r;
  dr = rot * dr;

  const double d1 = std::exp(-plan.gamma * rest);
  const double c = std::cos(w * rest);
  const double s = std::sin(w * rest);
  BlochWithDerivative out;
  out.r = {d1 * (c * r(0) - s * r(1)), d1 * (c * r(1) + s * r(0)), r(2)};
  out.dr = Eigen::Vector3d(
      d1 * (-rest * s * r(0) + c * dr(0) - rest * c * r(1) - s * dr(1)),
      d1 * (-rest * s * r(1) + c * dr(1) + rest * c * r(0) + s * dr(0)), dr(2));
  return out;
}

BlochVector spontaneous_free_bloch(double gamma_plus, double gamma_minus, double omega0, double t,
                                   const BlochVector& r0) {
  require_nonnegative(gamma_plus, "gamma_plus");
  require_nonnegative(gamma_minus, "gamma_minus");
  require_nonnegative(t, "time");
  const double total = gamma_plus + gamma_minus;
  const double transverse = std::exp(-0.5 * total * t);
  const double c = std::cos(omega0 * t);
  const double s = std::sin(omega0 * t);
  BlochVector r{transverse * (c * r0.r1 - s * r0.r2), transverse * (c * r0.r2 + s * r0.r1), r0.r3};
  if (total > 0.0) {
    const double longitudinal = std::exp(-total * t);
    r.r3 = (gamma_plus - gamma_minus) / total * (-std::expm1(-total * t)) + longitudinal * r0.r3;
  }
  return r;
}

double spontaneous_free_qfi(double gamma_plus, double gamma_minus, double horizon) {
  require_nonnegative(gamma_plus, "gamma_plus");
  require_nonnegative(gamma_minus, "gamma_minus");
  require_nonnegative(horizon, "horizon");
  return std::exp(-(gamma_plus + gamma_minus) * horizon) * horizon * horizon;
}

namespace {

struct PrePulse {
  double r1;
  double r3;
  double norm;
};

PrePulse pre_pulse(const SinglePulsePlan& plan) {
  const double g = plan.gamma;
  const double r1 = std::exp(-0.5 * g * plan.t0) * std::cos(plan.omega_bar * plan.t0);
  const double r3 = std::expm1(-g * plan.t0);
  const double norm = std::hypot(r1, r3);
  if (norm < 1e-14) {
    throw UndefinedRotationError(
        "rotation back to the x-y plane is undefined: state has no x-z component at t0");
  }
  return {r1, r3, norm};
}

}  // namespace

Eigen::Matrix3d spontaneous_pulse_rotation(const SinglePulsePlan& plan) {
  plan.validate();
  const PrePulse pre = pre_pulse(plan);
  const double c = pre.r1 / pre.norm;
  const double s = pre.r3 / pre.norm;
  Eigen::Matrix3d rot;
  rot << c, 0, s, 0, 1, 0, -s, 0, c;
  return rot;
}

double spontaneous_pulse_angle(const SinglePulsePlan& plan) {
  plan.validate();
  const PrePulse pre = pre_pulse(plan);
  return std::atan2(pre.r3, pre.r1);
}

BlochWithDerivative spontaneous_single_pulse_state(const SinglePulsePlan& plan) {
  plan.validate();
  pre_pulse(plan);  // degenerate rotations are rejected here
  const double g = plan.gamma;
  const double w = plan.omega_bar;
  const double t0 = plan.t0;
  const double big_t = plan.horizon;
  const double rest = big_t - t0;

  // |(r1, r3)| at t0, with the e^{-g t0/2} factor pulled out
  const double root = std::sqrt(std::pow(std::cos(w * t0), 2) + std::exp(g * t0) - 2.0 +
                                std::exp(-g * t0));
  const double envelope = std::exp(-0.5 * g * big_t);
  const double c = std::cos(w * rest);
  const double s = std::sin(w * rest);
  const double st = std::sin(w * t0);
  const double ct = std::cos(w * t0);
  const double skew = t0 * ct / root;

  BlochWithDerivative out;
  out.r = {envelope * (c * root - s * st), envelope * (c * st + s * root),
           std::expm1(-g * rest)};
  out.dr = Eigen::Vector3d(
      envelope * (-rest * s * root + t0 * std::sin(w * (2.0 * t0 - big_t)) - c * st * (skew + big_t)),
      envelope * (rest * c * root + t0 * std::cos(w * (2.0 * t0 - big_t)) - s * st * (skew + big_t)),
      (std::exp(-g * big_t) - std::exp(-g * rest)) * t0 * st / root);
  return out;
}

double spontaneous_single_pulse_qfi(const SinglePulsePlan& plan) {
  const BlochWithDerivative state = spontaneous_single_pulse_state(plan);
  return qfi_bloch(state.r, state.dr);
}

}  // namespace qgrape::oracles
