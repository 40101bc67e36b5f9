#pragma once

// Shared test helpers. Everything here works on plain 2x2 matrices and
// avoids the library's superoperator code so it can serve as an oracle.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qgrape/dynamics.hpp"
#include "qgrape/fisher.hpp"
#include "qgrape/linalg.hpp"

namespace qgrape::testing {

inline Mat2 sx() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 sy() { Mat2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat2 sz() { Mat2 m; m << 1, 0, 0, -1; return m; }
inline Mat2 id2() { return Mat2::Identity(); }

inline Mat2 comm(const Mat2& a, const Mat2& b) { return a * b - b * a; }
inline Mat2 anti(const Mat2& a, const Mat2& b) { return a * b + b * a; }

// Lindblad generator applied directly to rho.
inline Mat2 lindblad_rhs(const Mat2& h, const NoiseModel& noise, const Mat2& rho) {
  Mat2 out = -cplx(0, 1) * comm(h, rho);
  if (const auto* d = std::get_if<Dephasing>(&noise)) {
    const Mat2 n = std::sin(d->theta) * std::cos(d->phi) * sx() +
                   std::sin(d->theta) * std::sin(d->phi) * sy() + std::cos(d->theta) * sz();
    out += 0.5 * d->gamma * (n * rho * n - rho);
  } else if (const auto* s = std::get_if<SpontaneousEmission>(&noise)) {
    Mat2 up;
    up << 0, 1, 0, 0;  // |0><1|
    const Mat2 down = up.adjoint();
    auto term = [&](const Mat2& l) {
      return (l * rho * l.adjoint() - 0.5 * anti(l.adjoint() * l, rho)).eval();
    };
    out += s->gamma_plus * term(up) + s->gamma_minus * term(down);
  }
  return out;
}

// Classical RK4 with `substeps` stages per control step, at parameter x.
inline Mat2 rk4_final_state(const EstimationProblem& p, const ControlGrid& grid, double x,
                            int substeps = 40) {
  Mat2 rho = p.probe.matrix();
  const double h = grid.dt() / substeps;
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    Mat2 ham = 0.5 * x * sz();
    for (std::size_t k = 0; k < grid.controls(); ++k) ham += grid(j, k) * p.control_generators[k];
    for (int s = 0; s < substeps; ++s) {
      const Mat2 k1 = lindblad_rhs(ham, p.noise, rho);
      const Mat2 k2 = lindblad_rhs(ham, p.noise, rho + 0.5 * h * k1);
      const Mat2 k3 = lindblad_rhs(ham, p.noise, rho + 0.5 * h * k2);
      const Mat2 k4 = lindblad_rhs(ham, p.noise, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return rho;
}

inline Mat2 matrix_from_bloch(const Eigen::Vector3d& r) {
  return 0.5 * (id2() + r(0) * sx() + r(1) * sy() + r(2) * sz());
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

// Bloch vector uniformly inside the ball of the given radius.
inline Eigen::Vector3d random_in_ball(std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return radius * std::cbrt(u(rng)) * random_unit(rng);
}

inline Mat2 random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat2 m;
  m << n(rng), cplx(n(rng), n(rng)), 0, n(rng);
  m(1, 0) = std::conj(m(0, 1));
  return m;
}

inline Mat2 random_traceless_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  Mat2 m = random_hermitian(rng, scale);
  return m - 0.5 * m.trace() * id2();
}

inline Mat2 random_unitary(std::mt19937_64& rng) {
  const Mat2 h = random_hermitian(rng, 2.0);
  Eigen::SelfAdjointEigenSolver<Mat2> es(h);
  Mat2 d = Mat2::Zero();
  for (int i = 0; i < 2; ++i) d(i, i) = std::exp(cplx(0, es.eigenvalues()(i)));
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

// n random PSD effects normalized to sum to the identity: E_i = S^{-1/2} A_i S^{-1/2}.
inline Povm random_povm(std::mt19937_64& rng, int n) {
  std::vector<Mat2> a;
  Mat2 s = Mat2::Zero();
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Mat2 b;
    b << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
    a.push_back(b * b.adjoint());
    s += a.back();
  }
  Eigen::SelfAdjointEigenSolver<Mat2> es(s);
  Mat2 inv_sqrt = Mat2::Zero();
  for (int i = 0; i < 2; ++i) inv_sqrt(i, i) = 1.0 / std::sqrt(es.eigenvalues()(i));
  inv_sqrt = es.eigenvectors() * inv_sqrt * es.eigenvectors().adjoint();
  std::vector<Mat2> effects;
  for (const auto& ai : a) {
    Mat2 e = inv_sqrt * ai * inv_sqrt;
    effects.push_back(0.5 * (e + e.adjoint()));
  }
  return Povm(effects);
}

inline ControlGrid random_grid(std::mt19937_64& rng, std::size_t m, std::size_t p, double dt,
                               double amplitude = 1.0) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return ControlGrid(a, dt);
}

// QFI from the 4x4 Lyapunov system (rho kron 1 + 1 kron rho^T) vec L = 2 vec drho,
// solved by least squares, which picks the minimal-norm SLD.
inline double lyapunov_qfi(const Mat2& rho, const Mat2& drho) {
  Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
  // row-major vec: vec(rho L + L rho)_{(i,j)} = sum_k rho_ik L_kj + L_ik rho_kj
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        a(2 * i + j, 2 * k + j) += rho(i, k);
        a(2 * i + j, 2 * i + k) += rho(k, j);
      }
  Eigen::Vector4cd b;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b(2 * i + j) = 2.0 * drho(i, j);
  const Eigen::Vector4cd l = a.completeOrthogonalDecomposition().solve(b);
  Mat2 lm;
  lm << l(0), l(1), l(2), l(3);
  return (rho * lm * lm).trace().real();
}

}  // namespace qgrape::testing
