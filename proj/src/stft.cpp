// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/stft.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "tvcov/error.hpp"

namespace tvcov {

Waveform Waveform::Zeros(std::size_t num_channels, std::size_t num_samples,
                         double sample_rate) {
  Waveform w;
  w.channels.assign(num_channels, std::vector<double>(num_samples, 0.0));
  w.sample_rate = sample_rate;
  return w;
}

void Waveform::Validate() const {
  if (!(sample_rate > 0.0))
    throw InvalidArgument("waveform sample rate must be positive");
  for (const auto& c : channels)
    if (c.size() != channels.front().size())
      throw InvalidArgument("waveform channels differ in length");
}

Waveform Waveform::Channel(std::size_t m) const {
  if (m >= channels.size())
    throw InvalidArgument("channel index out of range");
  Waveform w;
  w.channels = {channels[m]};
  w.sample_rate = sample_rate;
  return w;
}

SpectrogramTensor::SpectrogramTensor(int num_frames, int num_channels,
                                     int frame_size, int hop,
                                     std::size_t signal_length)
    : num_frames_(num_frames),
      num_bins_(frame_size / 2 + 1),
      num_channels_(num_channels),
      frame_size_(frame_size),
      hop_(hop),
      signal_length_(signal_length),
      data_(std::size_t(num_frames) * num_bins_ * num_channels) {
  if (num_frames < 1 || num_channels < 1 || frame_size < 2 || hop < 1)
    throw InvalidArgument("invalid spectrogram geometry");
}

bool SpectrogramTensor::SameGeometry(const SpectrogramTensor& o) const {
  return num_frames_ == o.num_frames_ && num_bins_ == o.num_bins_ &&
         frame_size_ == o.frame_size_ && hop_ == o.hop_;
}

std::vector<double> SqrtHannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = std::sin(std::numbers::pi * i / n);
  return w;
}

int NumFrames(std::size_t num_samples, int hop) {
  return int((num_samples + hop - 1) / hop) + 1;
}

SpectrogramTensor Analyze(const Waveform& w, int frame_size, int hop) {
  w.Validate();
  if (w.empty() || w.num_channels() == 0)
    throw InvalidArgument("cannot analyze an empty waveform");
  if (frame_size < 2 || frame_size % 2 != 0)
    throw InvalidArgument("frame size must be even");
  if (hop < 1 || hop > frame_size)
    throw InvalidArgument("hop must be in [1, frame_size]");
  if (frame_size % hop != 0)
    throw InvalidArgument("hop must divide the frame size");

  const std::size_t n = w.num_samples();
  const int num_frames = NumFrames(n, hop);
  const int pad = frame_size / 2;
  const int channels = int(w.num_channels());
  SpectrogramTensor s(num_frames, channels, frame_size, hop, n);
  const auto window = SqrtHannWindow(frame_size);

  internal::RealFft fft(frame_size);
  std::vector<double> buf(frame_size);
  std::vector<Complex> spec(fft.num_bins());
  for (int m = 0; m < channels; ++m) {
    const auto& x = w.channels[m];
    for (int l = 0; l < num_frames; ++l) {
      const long start = long(l) * hop - pad;
      for (int i = 0; i < frame_size; ++i) {
        const long t = start + i;
        buf[i] = (t >= 0 && t < long(n)) ? x[t] * window[i] : 0.0;
      }
      fft.Forward(buf, spec);
      for (int k = 0; k < s.num_bins(); ++k) s.at(l, k, m) = spec[k];
    }
  }
  return s;
}

Waveform Synthesize(const SpectrogramTensor& s, double sample_rate) {
  const int frame_size = s.frame_size();
  const int hop = s.hop();
  if (frame_size < 2 || hop < 1 || s.num_bins() != frame_size / 2 + 1)
    throw InvalidArgument("inconsistent spectrogram geometry");
  const int pad = frame_size / 2;
  const std::size_t padded = std::size_t(s.num_frames() - 1) * hop + frame_size;
  std::size_t n = s.signal_length();
  if (n == 0) n = padded - 2 * pad;
  if (n + pad > padded)
    throw InvalidArgument("signal length exceeds the spectrogram extent");

  const auto window = SqrtHannWindow(frame_size);
  std::vector<double> norm(padded, 0.0);
  for (int l = 0; l < s.num_frames(); ++l)
    for (int i = 0; i < frame_size; ++i)
      norm[std::size_t(l) * hop + i] += window[i] * window[i];

  Waveform out = Waveform::Zeros(s.num_channels(), n, sample_rate);
  internal::RealFft fft(frame_size);
  std::vector<Complex> spec(s.num_bins());
  std::vector<double> frame(frame_size);
  std::vector<double> acc(padded);
  for (int m = 0; m < s.num_channels(); ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int l = 0; l < s.num_frames(); ++l) {
      for (int k = 0; k < s.num_bins(); ++k) spec[k] = s.at(l, k, m);
      fft.Inverse(spec, frame);
      for (int i = 0; i < frame_size; ++i)
        acc[std::size_t(l) * hop + i] += frame[i] * window[i];
    }
    auto& y = out.channels[m];
    for (std::size_t t = 0; t < n; ++t) {
      const double g = norm[t + pad];
      y[t] = g > 1e-12 ? acc[t + pad] / g : 0.0;
    }
  }
  return out;
}

}  // namespace tvcov
