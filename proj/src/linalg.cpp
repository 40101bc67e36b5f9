#include "qgrape/linalg.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "qgrape/errors.hpp"

namespace qgrape {

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Mat2 y() {
  Mat2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}
Mat2 z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
Mat2 raising() { return 0.5 * (x() + kI * y()); }
Mat2 lowering() { return 0.5 * (x() - kI * y()); }
}  // namespace pauli

Vec4 vectorize(const Mat2& m) {
  return Vec4(m(0, 0), m(1, 0), m(0, 1), m(1, 1));
}

Mat2 devectorize(const Vec4& v) {
  Mat2 m;
  m << v(0), v(2), v(1), v(3);
  return m;
}

CoVec4 trace_functional(const Mat2& a) {
  // Tr(A X) = sum_ab A_ab X_ba = vec(A^T) . vec(X)
  return vectorize(a.transpose()).transpose();
}

Superoperator sandwich(const Mat2& left, const Mat2& right) {
  Superoperator s;
  const Mat2 rt = right.transpose();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s.block<2, 2>(2 * a, 2 * b) = rt(a, b) * left;
  return s;
}

Superoperator commutator_superop_unchecked(const Mat2& h) {
  const Mat2 id = Mat2::Identity();
  return sandwich(h, id) - sandwich(id, h);
}

Superoperator commutator_superop(const Mat2& h) {
  if (!is_hermitian(h)) {
    throw ValidationError("commutator_superop: generator is not Hermitian");
  }
  return commutator_superop_unchecked(h);
}

double hermiticity_defect(const Mat2& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat2& m, double tol) {
  return hermiticity_defect(m) <= tol;
}

Superoperator expm(const Superoperator& a) { return a.exp(); }

Superoperator expm_frechet(const Superoperator& a, const Superoperator& e) {
  Eigen::Matrix<cplx, 8, 8> block = Eigen::Matrix<cplx, 8, 8>::Zero();
  block.topLeftCorner<4, 4>() = a;
  block.bottomRightCorner<4, 4>() = a;
  block.topRightCorner<4, 4>() = e;
  const Eigen::Matrix<cplx, 8, 8> ex = block.exp();
  return ex.topRightCorner<4, 4>();
}

Mat2 rotation_unitary(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d n = axis.normalized();
  const Mat2 generator = n(0) * pauli::x() + n(1) * pauli::y() + n(2) * pauli::z();
  return std::cos(angle / 2.0) * Mat2::Identity() -
         kI * std::sin(angle / 2.0) * generator;
}

}  // namespace qgrape
