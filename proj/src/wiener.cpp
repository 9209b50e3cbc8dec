// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/wiener.hpp"

#include "parallel.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

CVector FilterWithInverse(const FrequencyModel& m, const CVector& whitened,
                          int l) {
  const int nm = m.n_mics;
  const double v = m.source_variance[l];
  // R_0 is zero outside its leading N_m block, so only the first block of
  // R^-1 x contributes.
  return v * (m.tap_block_view(0).topLeftCorner(nm, nm) * whitened.head(nm));
}

}  // namespace

CVector WienerFrame(const FrequencyModel& m, const StackedObservations& obs,
                    int l) {
  if (l < 0 || l >= m.num_frames() || obs.cols() != m.num_frames() ||
      obs.rows() != m.dim())
    throw InvalidArgument("frame or observation geometry mismatch");
  if (m.source_variance[l] == 0.0) return CVector::Zero(m.n_mics);
  const CVector w =
      HermitianSolve(AssembleMixtureCovariance(m, l), obs.col(l));
  return FilterWithInverse(m, w, l);
}

SpectrogramTensor ApplyFilter(const std::vector<FrequencyModel>& models,
                              const SpectrogramTensor& s,
                              const ModelConfig& cfg, int threads) {
  if (int(models.size()) != s.num_bins())
    throw InvalidArgument("one model per frequency bin is required");
  if (s.num_channels() != cfg.n_mics)
    throw InvalidArgument("spectrogram channel count does not match n_mics");
  for (const auto& m : models)
    if (m.num_frames() != s.num_frames() || m.n_mics != cfg.n_mics ||
        m.stack_length != cfg.stack_length)
      throw InvalidArgument("model geometry does not match the spectrogram");

  SpectrogramTensor out(s.num_frames(), cfg.n_mics, s.frame_size(), s.hop(),
                        s.signal_length());
  internal::ParallelFor(s.num_bins(), threads, [&](int k) {
    const FrequencyModel& m = models[k];
    const StackedObservations obs = StackFrequency(s, k, cfg.stack_length);
    const FrameInverses inv = ComputeFrameInverses(m, obs);
    for (int l = 0; l < s.num_frames(); ++l) {
      if (m.source_variance[l] == 0.0) continue;
      const CVector y = FilterWithInverse(m, inv.whitened.col(l), l);
      auto f = out.frame(l, k);
      for (int c = 0; c < cfg.n_mics; ++c) f[c] = y(c);
    }
  });
  return out;
}

}  // namespace tvcov
