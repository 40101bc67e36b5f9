#pragma once

// Two-level operator algebra and the column-major vectorization used for
// superoperators.
//
// vec(rho) stacks columns: (rho00, rho10, rho01, rho11). Under this
// convention vec(A X B) = (B^T kron A) vec(X), so the commutator map
// X -> [A, X] has matrix (1 kron A) - (A^T kron 1).

#include <complex>

#include <Eigen/Dense>

namespace qgrape {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec4 = Eigen::Vector4cd;
using CoVec4 = Eigen::RowVector4cd;
using Superoperator = Eigen::Matrix4cd;

inline constexpr cplx kI{0.0, 1.0};

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
// sigma_plus = (sigma_x + i sigma_y)/2 = |0><1|; raises |1> to |0>.
Mat2 raising();
Mat2 lowering();
}  // namespace pauli

Vec4 vectorize(const Mat2& m);
Mat2 devectorize(const Vec4& v);

// Row vector c with c * vec(X) == Tr(A X).
CoVec4 trace_functional(const Mat2& a);

// X -> A X B
Superoperator sandwich(const Mat2& left, const Mat2& right);

// X -> [H, X]. Throws ValidationError when H is not Hermitian within 1e-12.
Superoperator commutator_superop(const Mat2& h);

// Same map with no Hermiticity check, for internal hot loops.
Superoperator commutator_superop_unchecked(const Mat2& h);

double hermiticity_defect(const Mat2& m);
bool is_hermitian(const Mat2& m, double tol = 1e-12);

// exp(A) for a 4x4 complex matrix.
Superoperator expm(const Superoperator& a);

// Frechet derivative of exp at A in direction E, i.e.
// d/ds exp(A + s E) at s = 0, from the upper-right block of
// exp([[A, E], [0, A]]).
Superoperator expm_frechet(const Superoperator& a, const Superoperator& e);

// 2x2 unitary exp(-i angle/2 n.sigma) rotating Bloch vectors by `angle`
// about the unit axis n (right-hand rule).
Mat2 rotation_unitary(const Eigen::Vector3d& axis, double angle);

}  // namespace qgrape
