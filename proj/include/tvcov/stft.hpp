// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_STFT_HPP_
#define TVCOV_STFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tvcov {

using Complex = std::complex<double>;

// Multichannel real signal, one vector per channel.
struct Waveform {
  std::vector<std::vector<double>> channels;
  double sample_rate = 16000.0;

  static Waveform Zeros(std::size_t num_channels, std::size_t num_samples,
                        double sample_rate);

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  bool empty() const { return num_samples() == 0; }

  // Throws InvalidArgument on ragged channels or a non-positive rate.
  void Validate() const;

  // A single-channel view of channel m.
  Waveform Channel(std::size_t m) const;
};

// Complex STFT coefficients x[l, k, m] for frame l, bin k, channel m.
//
// Storage is frequency-major: for a fixed bin, frames are contiguous and
// within a frame the channels are contiguous, so the per-frequency
// optimizer reads one contiguous block.
class SpectrogramTensor {
 public:
  SpectrogramTensor() = default;
  SpectrogramTensor(int num_frames, int num_channels, int frame_size, int hop,
                    std::size_t signal_length);

  int num_frames() const { return num_frames_; }
  int num_bins() const { return num_bins_; }
  int num_channels() const { return num_channels_; }
  int frame_size() const { return frame_size_; }
  int hop() const { return hop_; }
  // Length of the waveform this tensor was analyzed from.
  std::size_t signal_length() const { return signal_length_; }

  Complex& at(int l, int k, int m) { return data_[Index(l, k, m)]; }
  const Complex& at(int l, int k, int m) const { return data_[Index(l, k, m)]; }

  // The N_m channel values of frame l at bin k.
  std::span<Complex> frame(int l, int k) {
    return {data_.data() + Index(l, k, 0), std::size_t(num_channels_)};
  }
  std::span<const Complex> frame(int l, int k) const {
    return {data_.data() + Index(l, k, 0), std::size_t(num_channels_)};
  }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  bool SameGeometry(const SpectrogramTensor& other) const;

 private:
  std::size_t Index(int l, int k, int m) const {
    return (std::size_t(k) * num_frames_ + l) * num_channels_ + m;
  }

  int num_frames_ = 0;
  int num_bins_ = 0;
  int num_channels_ = 0;
  int frame_size_ = 0;
  int hop_ = 0;
  std::size_t signal_length_ = 0;
  std::vector<Complex> data_;
};

// Periodic square-root Hann window of length n.
std::vector<double> SqrtHannWindow(int n);

// Number of frames analyze() produces for a signal of the given length.
int NumFrames(std::size_t num_samples, int hop);

// Forward STFT. The signal is zero padded by frame_size/2 on the left and by
// at least frame_size/2 on the right, then framed every `hop` samples and
// weighted by the square-root Hann window.
SpectrogramTensor Analyze(const Waveform& w, int frame_size, int hop);

// Weighted overlap-add inverse of Analyze(). Output length equals the
// analyzed signal length.
Waveform Synthesize(const SpectrogramTensor& s, double sample_rate);

}  // namespace tvcov

#endif  // TVCOV_STFT_HPP_
