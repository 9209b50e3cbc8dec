// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_WIENER_HPP_
#define TVCOV_WIENER_HPP_

#include <vector>

#include "tvcov/model.hpp"
#include "tvcov/stft.hpp"

namespace tvcov {

// First N_m entries of v_l R_0 R_l^-1 x_l for one frame.
CVector WienerFrame(const FrequencyModel& m, const StackedObservations& obs,
                    int l);

// Time-varying multichannel Wiener filter over the whole tensor. The output
// has the input geometry with cfg.n_mics channels.
SpectrogramTensor ApplyFilter(const std::vector<FrequencyModel>& models,
                              const SpectrogramTensor& s,
                              const ModelConfig& cfg, int threads = 1);

}  // namespace tvcov

#endif  // TVCOV_WIENER_HPP_
