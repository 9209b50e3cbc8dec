// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/pipeline.hpp"

#include "tvcov/error.hpp"
#include "tvcov/wiener.hpp"

namespace tvcov {

const char* MethodName(Method m) {
  switch (m) {
    case Method::kProposed1: return "proposed1";
    case Method::kProposed2: return "proposed2";
    case Method::kTiv: return "tiv";
    case Method::kNctfMono: return "nctf_mono";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  if (name == "proposed1") return Method::kProposed1;
  if (name == "proposed2") return Method::kProposed2;
  if (name == "tiv") return Method::kTiv;
  if (name == "nctf_mono") return Method::kNctfMono;
  throw ConfigError("unknown method '" + name +
                    "' (expected proposed1, proposed2, tiv or nctf_mono)");
}

ModelConfig ConfigureMethod(Method method, ModelConfig base) {
  switch (method) {
    case Method::kProposed1:
      base.stack_length = 1;
      break;
    case Method::kProposed2:
      base.stack_length = base.tap_length;
      break;
    case Method::kTiv:
      if (base.stack_length <= 1) base.stack_length = 6;
      base.tap_length = 1;
      break;
    case Method::kNctfMono:
      base.n_mics = 1;
      base.stack_length = 1;
      break;
  }
  return base;
}

void CheckMethodConfig(Method method, const ModelConfig& cfg) {
  const char* name = MethodName(method);
  auto fail = [&](const char* why) {
    throw ConfigError(std::string(name) + ": " + why);
  };
  switch (method) {
    case Method::kProposed1:
      if (cfg.stack_length != 1) fail("requires stack_length == 1");
      break;
    case Method::kProposed2:
      if (cfg.stack_length != cfg.tap_length) fail("requires stack_length == tap_length");
      break;
    case Method::kTiv:
      if (cfg.tap_length != 1 || cfg.stack_length <= 1)
        fail("requires tap_length == 1 and stack_length > 1");
      break;
    case Method::kNctfMono:
      if (cfg.n_mics != 1 || cfg.stack_length != 1)
        fail("requires n_mics == 1 and stack_length == 1");
      break;
  }
}

DereverbResult Dereverberate(const Waveform& input, const ModelConfig& cfg,
                             const StftConfig& stft, int threads) {
  cfg.Validate();
  input.Validate();
  if (int(input.num_channels()) < cfg.n_mics)
    throw InvalidArgument("input has " + std::to_string(input.num_channels()) +
                          " channels, model needs " + std::to_string(cfg.n_mics));
  Waveform used = input;
  used.channels.resize(cfg.n_mics);

  const SpectrogramTensor s = Analyze(used, stft.frame_size, stft.hop);
  DereverbResult result;
  result.fit = Iterate(s, cfg, {threads});
  const SpectrogramTensor y = ApplyFilter(result.fit.models, s, cfg, threads);
  result.output = Synthesize(y, input.sample_rate);
  return result;
}

Waveform Downmix(const Waveform& w) {
  w.Validate();
  Waveform out = Waveform::Zeros(1, w.num_samples(), w.sample_rate);
  if (w.num_channels() == 0) return out;
  for (const auto& c : w.channels)
    for (std::size_t t = 0; t < c.size(); ++t) out.channels[0][t] += c[t];
  for (auto& x : out.channels[0]) x /= double(w.num_channels());
  return out;
}

}  // namespace tvcov
