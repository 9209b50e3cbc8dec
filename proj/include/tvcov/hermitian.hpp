// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_HERMITIAN_HPP_
#define TVCOV_HERMITIAN_HPP_

#include <Eigen/Dense>

namespace tvcov {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultPdFloor = 1e-7;

// (A + A^H) / 2.
CMatrix Hermitize(const CMatrix& a);

bool IsHermitian(const CMatrix& a, double tol = 1e-12);

// Smallest eigenvalue of the Hermitian part of a.
double MinEigenvalue(const CMatrix& a);

// Re tr(A B), the Frobenius inner product <A, B^H>; exact for Hermitian
// arguments without forming the product.
double TraceOfProduct(const Eigen::Ref<const CMatrix>& a,
                      const Eigen::Ref<const CMatrix>& b);

// Solves a x = y for positive definite a. Throws NumericalError when a is
// not positive definite or singular to working precision.
CVector HermitianSolve(const CMatrix& a, const CVector& y);

// Inverse of a positive definite matrix, returned exactly Hermitian.
CMatrix HermitianInverse(const CMatrix& a);

// Clamps the eigenvalues of a to at least eps_rel * tr(a) / dim with the
// eigenvectors preserved. A matrix already above the floor is returned
// as-is (symmetrized). For a non-positive trace the reference level is the
// mean absolute eigenvalue instead.
CMatrix PsdFloor(const CMatrix& a, double eps_rel = kDefaultPdFloor);

// Principal square root of a positive semidefinite matrix; eigenvalues below
// zero are treated as zero.
CMatrix PsdSqrt(const CMatrix& a);

// Geometric mean A # B: the unique positive definite X with X A^-1 X = B,
// computed as A^1/2 (A^-1/2 B A^-1/2)^1/2 A^1/2. Throws InvalidArgument on
// mismatched dims and NumericalError when either input is not positive
// definite.
CMatrix GeometricMean(const CMatrix& a, const CMatrix& b);

namespace internal {

// Geometric mean for the optimizer: `a` must be positive definite, while `b`
// may be rank deficient (negative round-off eigenvalues are dropped). Used
// where b is a finite sum of rank-one outer products.
CMatrix GeometricMeanSemidefinite(const CMatrix& a, const CMatrix& b);

// Same, with a given through its inverse: returns inv(g) # b for PD g
// without forming inv(g) first.
CMatrix InverseGeometricMean(const CMatrix& g, const CMatrix& b);

}  // namespace internal
}  // namespace tvcov

#endif  // TVCOV_HERMITIAN_HPP_
