#include "qgrape/fisher.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qgrape/errors.hpp"

namespace qgrape {

namespace {

Mat2 projector(const Eigen::Vector2cd& v) { return v * v.adjoint(); }

}  // namespace

Povm::Povm(std::vector<Mat2> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw ValidationError("POVM needs at least one effect");
  Mat2 total = Mat2::Zero();
  for (const auto& e : effects_) {
    if (!is_hermitian(e, 1e-10)) throw ValidationError("POVM effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (e + e.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw ValidationError("POVM effect is not positive semidefinite");
    }
    total += e;
  }
  if ((total - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("POVM effects do not sum to the identity");
  }
}

Povm Povm::trivial() { return Povm({Mat2::Identity()}); }

Povm Povm::plus_minus() {
  const double s = 1.0 / std::sqrt(2.0);
  return Povm({projector(Eigen::Vector2cd(s, s)), projector(Eigen::Vector2cd(s, -s))});
}

Povm Povm::computational() {
  return Povm({projector(Eigen::Vector2cd(1.0, 0.0)), projector(Eigen::Vector2cd(0.0, 1.0))});
}

SldOperator sld(const Mat2& rho, const Mat2& drho, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (rho + rho.adjoint()));
  const auto& lambda = es.eigenvalues();
  const Mat2& u = es.eigenvectors();
  const Mat2 d = u.adjoint() * drho * u;
  Mat2 l = Mat2::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double s = lambda(i) + lambda(j);
      if (s > tol) l(i, j) = 2.0 * d(i, j) / s;
    }
  }
  return {u * l * u.adjoint(), tol};
}

double qfi(const Mat2& rho, const Mat2& drho) {
  const Mat2 l = sld(rho, drho).matrix;
  return std::max(0.0, (rho * l * l).trace().real());
}

double qfi(const DensityState& rho, const Mat2& drho) { return qfi(rho.matrix(), drho); }

double qfi(const Mat2& rho, const Mat2& drho, const Mat2& d2rho) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (rho + rho.adjoint()));
  const auto& lambda = es.eigenvalues();
  const Mat2& u = es.eigenvectors();
  const Mat2 d = u.adjoint() * drho * u;
  const Mat2 d2 = u.adjoint() * d2rho * u;
  double f = qfi(rho, drho);
  for (int s = 0; s < 2; ++s) {
    if (2.0 * lambda(s) > kDefaultSldTolerance) continue;
    double curvature = d2(s, s).real();
    for (int k = 0; k < 2; ++k) {
      if (k != s && 2.0 * lambda(k) > kDefaultSldTolerance) {
        curvature += 2.0 * std::norm(d(k, s)) / (lambda(s) - lambda(k));
      }
    }
    f += 2.0 * std::max(0.0, curvature);
  }
  return f;
}

double qfi_bloch(const BlochVector& r, const Eigen::Vector3d& dr) {
  const Eigen::Vector3d v = r.vec();
  const double n2 = v.squaredNorm();
  if (n2 > 1.0 + 2e-10) throw ValidationError("qfi_bloch: Bloch vector outside the unit ball");
  const double overlap = v.dot(dr);
  if (std::abs(std::sqrt(n2) - 1.0) <= 1e-9) {
    if (std::abs(overlap) > 1e-8) {
      throw InconsistentInputError("qfi_bloch: pure state with a non-tangent derivative");
    }
    return dr.squaredNorm();
  }
  return dr.squaredNorm() + overlap * overlap / (1.0 - n2);
}

OutcomeStatistics outcome_statistics(const Mat2& rho, const Mat2& drho, const Povm& povm) {
  OutcomeStatistics s;
  s.probabilities.reserve(povm.size());
  s.derivatives.reserve(povm.size());
  for (const auto& e : povm.effects()) {
    s.probabilities.push_back((rho * e).trace().real());
    s.derivatives.push_back((drho * e).trace().real());
  }
  return s;
}

namespace {

double cfi_impl(const Mat2& rho, const Mat2& drho, const Mat2* d2rho, const Povm& povm) {
  const auto stats = outcome_statistics(rho, drho, povm);
  double f = 0.0;
  for (std::size_t y = 0; y < povm.size(); ++y) {
    const double p = stats.probabilities[y];
    const double dp = stats.derivatives[y];
    if (p < kNegligibleProbability) {
      if (std::abs(dp) < kSingularDerivative) {
        if (d2rho) f += 2.0 * std::max(0.0, (*d2rho * povm.effects()[y]).trace().real());
        continue;
      }
      std::ostringstream msg;
      msg << "outcome " << y << " has probability " << p << " but derivative " << dp
          << "; classical Fisher information diverges";
      throw SingularOutcomeError(msg.str());
    }
    f += dp * dp / p;
  }
  return f;
}

}  // namespace

double cfi(const Mat2& rho, const Mat2& drho, const Povm& povm) {
  return cfi_impl(rho, drho, nullptr, povm);
}

double cfi(const Mat2& rho, const Mat2& drho, const Mat2& d2rho, const Povm& povm) {
  return cfi_impl(rho, drho, &d2rho, povm);
}

Mat2 terminal_derivative(const Trajectory& traj) {
  return traj.parameter_derivative(traj.phi.size() - 1);
}

Mat2 terminal_second_derivative(const Trajectory& traj) {
  return traj.parameter_second_derivative(traj.psi.size() - 1);
}

}  // namespace qgrape
