// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cholesky.hpp"

#include <cmath>

namespace tvcov::internal {

using Complex = std::complex<double>;

bool SmallCholesky::Compute(const CMatrix& a) {
  const int n = int(a.rows());
  l_.resize(n, n);
  have_inverse_ = false;
  Complex* l = l_.data();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l[j + k * n]);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    l[j + j * n] = d;
    const double inv = 1.0 / d;
    for (int i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l[i + k * n] * std::conj(l[j + k * n]);
      l[i + j * n] = s * inv;
    }
    for (int i = 0; i < j; ++i) l[i + j * n] = 0.0;
  }
  return true;
}

double SmallCholesky::PivotRatio() const {
  const auto d = l_.diagonal().real();
  return d.maxCoeff() / d.minCoeff();
}

double SmallCholesky::LogDet() const {
  double s = 0.0;
  for (int j = 0; j < size(); ++j) s += std::log(l_(j, j).real());
  return 2.0 * s;
}

const CMatrix& SmallCholesky::InverseFactor() {
  if (have_inverse_) return linv_;
  const int n = size();
  linv_.setZero(n, n);
  const Complex* l = l_.data();
  Complex* x = linv_.data();
  for (int j = 0; j < n; ++j) {
    x[j + j * n] = 1.0 / l[j + j * n].real();
    for (int i = j + 1; i < n; ++i) {
      Complex s = 0.0;
      for (int k = j; k < i; ++k) s += l[i + k * n] * x[k + j * n];
      x[i + j * n] = -s / l[i + i * n].real();
    }
  }
  have_inverse_ = true;
  return linv_;
}

void SmallCholesky::Inverse(CMatrix* out) {
  const CMatrix& x = InverseFactor();
  const int n = size();
  out->resize(n, n);
  const Complex* xp = x.data();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      // sum_k conj(X(k, i)) X(k, j), k >= max(i, j) = j
      Complex s = 0.0;
      for (int k = j; k < n; ++k) s += std::conj(xp[k + i * n]) * xp[k + j * n];
      (*out)(i, j) = s;
      (*out)(j, i) = std::conj(s);
    }
    (*out)(j, j) = (*out)(j, j).real();
  }
}

void SmallCholesky::ForwardSolve(const Eigen::Ref<const CVector>& x,
                                 CVector* y) {
  const int n = size();
  y->resize(n);
  const Complex* l = l_.data();
  for (int i = 0; i < n; ++i) {
    Complex s = x(i);
    for (int k = 0; k < i; ++k) s -= l[i + k * n] * (*y)(k);
    (*y)(i) = s / l[i + i * n].real();
  }
}

void SmallCholesky::BackwardSolve(const CVector& y, CVector* x) {
  const int n = size();
  x->resize(n);
  const Complex* l = l_.data();
  for (int i = n - 1; i >= 0; --i) {
    Complex s = y(i);
    for (int k = i + 1; k < n; ++k) s -= std::conj(l[k + i * n]) * (*x)(k);
    (*x)(i) = s / l[i + i * n].real();
  }
}

}  // namespace tvcov::internal
