// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_PIPELINE_HPP_
#define TVCOV_PIPELINE_HPP_

#include <string>

#include "tvcov/model.hpp"
#include "tvcov/optimizer.hpp"
#include "tvcov/stft.hpp"

namespace tvcov {

// proposed1: current observation only (stack_length 1).
// proposed2: stacked observation with stack_length == tap_length.
// tiv: one time-varying tap, late reverberation left to the time-invariant
//      noise covariance of the stacked observation.
// nctf_mono: first channel only, stack_length 1; the single-channel special
//      case equivalent to a power-domain convolutive transfer function.
enum class Method { kProposed1, kProposed2, kTiv, kNctfMono };

const char* MethodName(Method m);
// Throws ConfigError for an unknown tag.
Method ParseMethod(const std::string& name);

// Applies the structural settings of a method to `base`.
ModelConfig ConfigureMethod(Method method, ModelConfig base);
// Throws ConfigError when cfg violates the method's structure.
void CheckMethodConfig(Method method, const ModelConfig& cfg);

struct StftConfig {
  int frame_size = 1024;
  int hop = 512;
};

struct DereverbResult {
  Waveform output;  // cfg.n_mics channels
  FitResult fit;
};

// STFT, per-frequency fit, Wiener filtering and resynthesis. Uses the first
// cfg.n_mics channels of the input.
DereverbResult Dereverberate(const Waveform& input, const ModelConfig& cfg,
                             const StftConfig& stft = {}, int threads = 1);

// Mean over channels.
Waveform Downmix(const Waveform& w);

}  // namespace tvcov

#endif  // TVCOV_PIPELINE_HPP_
