// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_SRC_FFT_HPP_
#define TVCOV_SRC_FFT_HPP_

#include <complex>
#include <span>
#include <vector>

namespace tvcov::internal {

// Real-input FFT of fixed size backed by FFTW. Plans are created with
// FFTW_ESTIMATE so results do not depend on planner timing.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // Unnormalized forward transform; `in` may be shorter than size() and is
  // zero padded.
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Inverse transform including the 1/size normalization.
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int size_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

// Linear convolution of a and b (length a.size() + b.size() - 1).
std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b);

// Full cross-correlation c[lag] = sum_n a[n + lag] * b[n] for
// lag in [-max_lag, max_lag]; index 0 of the result is lag -max_lag.
std::vector<double> CrossCorrelate(std::span<const double> a,
                                   std::span<const double> b, int max_lag);

}  // namespace tvcov::internal

#endif  // TVCOV_SRC_FFT_HPP_
