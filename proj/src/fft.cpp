// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "tvcov/error.hpp"

namespace tvcov::internal {
namespace {

// The FFTW planner is not reentrant; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

int NextFastSize(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return static_cast<int>(p);
}

// Per-thread plans keyed by size; the simulator convolves many signals of
// the same length.
RealFft& CachedFft(int size) {
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<RealFft>(size);
  return *slot;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 1) throw InvalidArgument("FFT size must be positive");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  real_ = fftw_alloc_real(size_);
  auto* spec = fftw_alloc_complex(num_bins());
  spec_ = spec;
  forward_ = fftw_plan_dft_r2c_1d(size_, real_, spec, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(size_, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  const std::size_t n = std::min<std::size_t>(in.size(), size_);
  std::copy_n(in.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_));
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (int k = 0; k < num_bins() && k < int(out.size()); ++k)
    out[k] = {spec[k][0], spec[k][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (int k = 0; k < num_bins(); ++k) {
    const auto v = k < int(in.size()) ? in[k] : std::complex<double>{};
    spec[k][0] = v.real();
    spec[k][1] = v.imag();
  }
  // c2r ignores the imaginary parts of DC and Nyquist.
  fftw_execute(static_cast<fftw_plan>(inverse_));
  const double scale = 1.0 / size_;
  for (int n = 0; n < size_ && n < int(out.size()); ++n)
    out[n] = real_[n] * scale;
}

std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  RealFft& fft = CachedFft(NextFastSize(out_len));
  std::vector<std::complex<double>> fa(fft.num_bins()), fb(fft.num_bins());
  fft.Forward(a, fa);
  fft.Forward(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out(fft.size());
  fft.Inverse(fa, out);
  out.resize(out_len);
  return out;
}

std::vector<double> CrossCorrelate(std::span<const double> a,
                                   std::span<const double> b, int max_lag) {
  RealFft& fft =
      CachedFft(NextFastSize(a.size() + b.size() + 2 * std::size_t(max_lag)));
  std::vector<std::complex<double>> fa(fft.num_bins()), fb(fft.num_bins());
  fft.Forward(a, fa);
  fft.Forward(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= std::conj(fb[k]);
  std::vector<double> circ(fft.size());
  fft.Inverse(fa, circ);
  std::vector<double> out(2 * std::size_t(max_lag) + 1);
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const int idx = lag >= 0 ? lag : fft.size() + lag;
    out[lag + max_lag] = circ[idx];
  }
  return out;
}

}  // namespace tvcov::internal
