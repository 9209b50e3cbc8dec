// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "cholesky.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

using Solver = Eigen::SelfAdjointEigenSolver<CMatrix>;

Solver Decompose(const CMatrix& a) {
  Solver es(Hermitize(a));
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigendecomposition failed");
  return es;
}

CMatrix Reconstruct(const CMatrix& vectors, const Eigen::VectorXd& values) {
  return Hermitize(vectors * values.asDiagonal() * vectors.adjoint());
}

void RequireSquare(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw InvalidArgument(std::string(what) + ": matrix must be square");
}

// Eigenvalues must be positive relative to the largest one.
void RequirePositive(const Eigen::VectorXd& eig, const char* what) {
  const double top = eig.cwiseAbs().maxCoeff();
  if (!(eig.minCoeff() > top * 64 * std::numeric_limits<double>::epsilon()))
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
}

}  // namespace

CMatrix Hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

bool IsHermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double MinEigenvalue(const CMatrix& a) {
  RequireSquare(a, "MinEigenvalue");
  return Solver(Hermitize(a), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double TraceOfProduct(const Eigen::Ref<const CMatrix>& a,
                      const Eigen::Ref<const CMatrix>& b) {
  // tr(AB) = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum().real();
}

CVector HermitianSolve(const CMatrix& a, const CVector& y) {
  RequireSquare(a, "HermitianSolve");
  if (y.size() != a.rows())
    throw InvalidArgument("HermitianSolve: dimension mismatch");
  Eigen::LLT<CMatrix> llt(Hermitize(a));
  if (llt.info() != Eigen::Success)
    throw NumericalError("HermitianSolve: matrix is not positive definite");
  const auto d = llt.matrixLLT().diagonal().real().cwiseAbs();
  const double ratio = d.maxCoeff() / d.minCoeff();
  if (!(ratio * ratio < 1.0 / std::numeric_limits<double>::epsilon()))
    throw NumericalError("HermitianSolve: matrix is singular to working precision");
  return llt.solve(y);
}

CMatrix HermitianInverse(const CMatrix& a) {
  RequireSquare(a, "HermitianInverse");
  Eigen::LLT<CMatrix> llt(Hermitize(a));
  if (llt.info() != Eigen::Success)
    throw NumericalError("HermitianInverse: matrix is not positive definite");
  return Hermitize(llt.solve(CMatrix::Identity(a.rows(), a.cols())));
}

CMatrix PsdFloor(const CMatrix& a, double eps_rel) {
  RequireSquare(a, "PsdFloor");
  const CMatrix h = Hermitize(a);
  double reference = h.trace().real() / double(h.rows());
  if (reference > 0.0) {
    // Cheap exit: h - floor I positive definite means nothing is clamped.
    internal::SmallCholesky chol;
    if (chol.Compute(h - CMatrix::Identity(h.rows(), h.cols()) *
                             (eps_rel * reference)))
      return h;
  }
  const Solver es = Decompose(h);
  Eigen::VectorXd eig = es.eigenvalues();
  if (!(reference > 0.0)) reference = eig.cwiseAbs().mean();
  if (!(reference > 0.0)) reference = std::numeric_limits<double>::min();
  const double floor = eps_rel * reference;
  if (eig.minCoeff() >= floor) return h;
  eig = eig.cwiseMax(floor);
  return Reconstruct(es.eigenvectors(), eig);
}

CMatrix PsdSqrt(const CMatrix& a) {
  RequireSquare(a, "PsdSqrt");
  const Solver es = Decompose(a);
  return Reconstruct(es.eigenvectors(), es.eigenvalues().cwiseMax(0.0).cwiseSqrt());
}

CMatrix GeometricMean(const CMatrix& a, const CMatrix& b) {
  RequireSquare(a, "GeometricMean");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("GeometricMean: dimension mismatch");
  RequirePositive(Decompose(b).eigenvalues(), "GeometricMean");
  return internal::GeometricMeanSemidefinite(a, b);
}

namespace internal {
namespace {

// Given the eigendecomposition a = U diag(lambda) U^H (lambda > 0), returns
// a^1/2 (a^-1/2 b a^-1/2)^1/2 a^1/2.
CMatrix MeanFromDecomposition(const CMatrix& u, const Eigen::VectorXd& lambda,
                              const CMatrix& b) {
  const Eigen::VectorXd s = lambda.cwiseSqrt();
  const CMatrix half = u * s.asDiagonal() * u.adjoint();
  const CMatrix inv_half = u * s.cwiseInverse().asDiagonal() * u.adjoint();
  const CMatrix inner = Hermitize(inv_half * b * inv_half);
  const Solver es(inner);
  if (es.info() != Eigen::Success)
    throw NumericalError("geometric mean: eigendecomposition failed");
  const CMatrix root = es.eigenvectors() *
                       es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                       es.eigenvectors().adjoint();
  return Hermitize(half * root * half);
}

// The pivot ratio squared bounds the condition number from below; past
// 1 / (64 eps) the eigen path decides whether the matrix counts as PD.
bool WellConditioned(const SmallCholesky& chol) {
  const double r = chol.PivotRatio();
  return r * r < 1.0 / (64 * std::numeric_limits<double>::epsilon());
}

}  // namespace

// With a = C C^H, a # b = C (C^-1 b C^-H)^1/2 C^H for any invertible C.
// Both entry points use the Cholesky factor and need one eigendecomposition.
CMatrix GeometricMeanSemidefinite(const CMatrix& a, const CMatrix& b) {
  SmallCholesky chol;
  if (!chol.Compute(Hermitize(a)) || !WellConditioned(chol)) {
    const Solver es = Decompose(a);
    RequirePositive(es.eigenvalues(), "GeometricMean");
    return MeanFromDecomposition(es.eigenvectors(), es.eigenvalues(), b);
  }
  const CMatrix& linv = chol.InverseFactor();
  const CMatrix& l = chol.factor();
  const CMatrix root = PsdSqrt(linv * b * linv.adjoint());
  return Hermitize(l * root * l.adjoint());
}

// g = L L^H gives inv(g) = C C^H with C = L^-H, so
// inv(g) # b = L^-H (L^H b L)^1/2 L^-1.
CMatrix InverseGeometricMean(const CMatrix& g, const CMatrix& b) {
  SmallCholesky chol;
  if (!chol.Compute(Hermitize(g)) || !WellConditioned(chol)) {
    const Solver es = Decompose(g);
    RequirePositive(es.eigenvalues(), "GeometricMean");
    return MeanFromDecomposition(es.eigenvectors(),
                                 es.eigenvalues().cwiseInverse(), b);
  }
  const CMatrix& linv = chol.InverseFactor();
  const CMatrix& l = chol.factor();
  const CMatrix root = PsdSqrt(l.adjoint() * b * l);
  return Hermitize(linv.adjoint() * root * linv);
}

}  // namespace internal
}  // namespace tvcov
