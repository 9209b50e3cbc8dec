// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_SIMULATE_HPP_
#define TVCOV_SIMULATE_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvcov/stft.hpp"

namespace tvcov {

// Azimuths (degrees) of the three responses blended by the motion law.
inline constexpr std::array<int, 3> kMotionAzimuths = {0, 15, 345};
// Azimuths used to build spatially diffuse noise.
inline constexpr std::array<int, 13> kDiffuseAzimuths = {
    0, 15, 30, 45, 60, 75, 90, 270, 285, 300, 315, 330, 345};

// Deterministic random stream derived from a run seed and a stream name, so
// that e.g. the RIR draw does not shift when the noise draw changes.
std::mt19937_64 Substream(uint64_t seed, std::string_view name);

// Multichannel impulse responses per source azimuth.
struct ImpulseResponseSet {
  double sample_rate = 16000.0;
  // azimuth in degrees -> [channel][tap]
  std::map<int, std::vector<std::vector<double>>> responses;

  bool Has(int azimuth) const { return responses.count(azimuth) != 0; }
  const std::vector<std::vector<double>>& At(int azimuth) const;
  int num_channels() const;
  std::size_t length() const;
  bool HasAll(std::span<const int> azimuths) const;
  // Equal channel counts and lengths, finite taps.
  void Validate() const;
};

// Amplitude envelope exp(-3 ln(10) t / rt60): -60 dB in power at t = rt60.
double RirEnvelope(double t, double rt60);

struct SyntheticRirOptions {
  double sample_rate = 16000.0;
  // Direct-to-reverberant energy ratio of the expected response.
  double drr_db = 0.0;
  double source_distance_m = 2.0;
  double mic_spacing_m = 0.03;
  double speed_of_sound = 343.0;
  std::vector<int> azimuths{kDiffuseAzimuths.begin(), kDiffuseAzimuths.end()};
};

// Exponentially decaying Gaussian-noise responses with a unit-gain
// fractional-delay direct path whose inter-microphone delay follows the
// azimuth on a linear array. Each (azimuth, channel) has its own stream.
ImpulseResponseSet SynthRir(double rt60, int n_mics, std::size_t length,
                            uint64_t seed,
                            const SyntheticRirOptions& options = {});

// Piecewise-linear interpolation of N(0, 1) anchors beta_b spaced
// segment_length samples apart:
//   alpha[bL + l] = ((L - l) / L) beta_b + (l / L) beta_{b+1}.
// Unless per_sample is set, alpha is held constant over blocks of
// block_length samples (evaluated at the block start).
struct MotionLaw {
  int segment_length = 4800;
  int block_length = 256;
  bool per_sample = false;
  std::vector<double> betas;  // empty: alpha == 0 everywhere

  static MotionLaw Static() { return {}; }
  // Enough anchors for num_samples, drawn from the "motion" substream.
  static MotionLaw Random(std::size_t num_samples, uint64_t seed,
                          int segment_length = 4800, int block_length = 256,
                          bool per_sample = false);

  double Alpha(std::size_t position) const;
  bool IsStatic() const;
};

struct BlendWeights {
  double center = 1.0;  // azimuth 0
  double right = 0.0;   // azimuth 15
  double left = 0.0;    // azimuth 345
};

// (1 - |alpha|), max(0, alpha), max(0, -alpha).
BlendWeights BlendWeightsFor(double alpha);

// The blended response a = (1-|alpha|) a_0 + max(0,alpha) a_15 +
// max(0,-alpha) a_345 at the given sample position, [channel][tap].
std::vector<std::vector<double>> TimeVaryingAtf(const ImpulseResponseSet& irs,
                                                const MotionLaw& law,
                                                std::size_t position);

// y_m[n] = sum_i a_{m, n, i} s[n - i] where a_{m, n} is the response the
// motion law selects for output sample n. Output has the source length.
Waveform ConvolveTimeVarying(const Waveform& source,
                             const ImpulseResponseSet& irs,
                             const MotionLaw& law);

// Factor g such that clean + g * noise has the requested SNR. The noise is
// looped or truncated to the clean length.
double NoiseScale(const Waveform& clean, const Waveform& noise, double snr_db);
Waveform MixNoise(const Waveform& clean, const Waveform& noise, double snr_db);

// 10 log10(P_clean / P_noise) over all channels.
double MeasureSnrDb(const Waveform& clean, const Waveform& noise);

struct NoiseField {
  Waveform noise;
  // "diffuse-13-azimuth" or "uncorrelated".
  std::string kind;
};

// Spectrum of the generated Gaussian noise.
enum class NoiseColor { kWhite, kPink };
const char* NoiseColorName(NoiseColor c);
NoiseColor ParseNoiseColor(const std::string& name);

// Sums independent excerpts of `source_noise` (Gaussian noise of the given
// color when empty) convolved with the response of every diffuse azimuth.
// Falls back to independent per-channel excerpts when the set lacks any of
// those azimuths.
NoiseField MakeNoiseField(const ImpulseResponseSet& irs,
                          std::size_t num_samples, uint64_t seed,
                          const std::vector<double>& source_noise = {},
                          NoiseColor color = NoiseColor::kPink);

// Synthetic speech-like signal: voiced segments from a glottal pulse train
// with gliding formant resonances, unvoiced noise bursts and pauses.
Waveform SpeechLikeSource(double seconds, double sample_rate, uint64_t seed);

enum class AtfScenario { kTimeInvariant, kTimeVarying };
const char* ScenarioName(AtfScenario s);
AtfScenario ParseScenario(const std::string& name);

struct ScenarioConfig {
  // Mono source WAV; empty selects SpeechLikeSource(duration_s).
  std::string source_path;
  // Noise WAV (first channel used); empty selects Gaussian noise.
  std::string noise_path;
  NoiseColor noise_color = NoiseColor::kPink;
  // Directory holding az<deg>.wav multichannel responses (e.g. az000.wav,
  // az015.wav, az345.wav); empty selects synthetic responses.
  std::string rir_dir;
  double rt60 = 0.61;
  double snr_db = 20.0;
  AtfScenario scenario = AtfScenario::kTimeInvariant;
  uint64_t seed = 1;
  int n_mics = 2;
  double duration_s = 10.0;
  double sample_rate = 16000.0;
  double rir_length_s = 1.0;
  double drr_db = 0.0;
  int segment_length = 4800;
  int block_length = 256;
  bool per_sample_blending = false;

  void Validate() const;
};

struct SimulatedMixture {
  Waveform mixture;      // reverberant + noise, n_mics channels
  Waveform reverberant;  // noise free
  Waveform reference;    // dry source, mono
  std::string noise_kind;
  std::string rir_kind;  // "synthetic" or "files"
};

ImpulseResponseSet LoadImpulseResponses(const std::string& dir);

SimulatedMixture Simulate(const ScenarioConfig& cfg);

}  // namespace tvcov

#endif  // TVCOV_SIMULATE_HPP_
