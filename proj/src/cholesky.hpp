// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_SRC_CHOLESKY_HPP_
#define TVCOV_SRC_CHOLESKY_HPP_

#include "tvcov/hermitian.hpp"

namespace tvcov::internal {

// Unblocked Cholesky for the small dense matrices of the model (dim <= a
// few dozen). Buffers are reused between calls of equal size.
class SmallCholesky {
 public:
  // Factors a = L L^H reading only the lower triangle. False when a pivot
  // is not positive.
  bool Compute(const CMatrix& a);

  int size() const { return int(l_.rows()); }
  const CMatrix& factor() const { return l_; }
  // max(diag L) / min(diag L), squared this bounds cond(a) from below.
  double PivotRatio() const;
  double LogDet() const;

  // L^-1, lower triangular. Valid after Compute().
  const CMatrix& InverseFactor();
  // a^-1 = L^-H L^-1, exactly Hermitian.
  void Inverse(CMatrix* out);
  // y = L^-1 x.
  void ForwardSolve(const Eigen::Ref<const CVector>& x, CVector* y);
  // x = L^-H y.
  void BackwardSolve(const CVector& y, CVector* x);

 private:
  CMatrix l_;
  CMatrix linv_;
  bool have_inverse_ = false;
};

}  // namespace tvcov::internal

#endif  // TVCOV_SRC_CHOLESKY_HPP_
