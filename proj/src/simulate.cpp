// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "fft.hpp"
#include "tvcov/error.hpp"
#include "tvcov/wav.hpp"

namespace tvcov {
namespace {

constexpr double kLn10 = 2.302585092994046;

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double Power(const Waveform& w) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& c : w.channels) {
    for (double x : c) acc += x * x;
    n += c.size();
  }
  return n ? acc / double(n) : 0.0;
}

// Noise resized to n samples per channel by looping.
Waveform Fit(const Waveform& noise, std::size_t n) {
  Waveform out = Waveform::Zeros(noise.num_channels(), n, noise.sample_rate);
  const std::size_t len = noise.num_samples();
  for (std::size_t c = 0; c < noise.num_channels(); ++c)
    for (std::size_t t = 0; t < n; ++t) out.channels[c][t] = noise.channels[c][t % len];
  return out;
}

// Gaussian noise; pink via a sum of first-order sections approximating a
// -3 dB/octave slope over the audio band, after a warm-up.
std::vector<double> GaussianNoise(std::size_t n, NoiseColor color, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> out(n);
  if (color == NoiseColor::kWhite) {
    for (auto& x : out) x = gauss(rng);
    return out;
  }
  constexpr std::size_t kWarmup = 8192;
  double b[7] = {};
  for (std::size_t t = 0; t < n + kWarmup; ++t) {
    const double w = gauss(rng);
    b[0] = 0.99886 * b[0] + w * 0.0555179;
    b[1] = 0.99332 * b[1] + w * 0.0750759;
    b[2] = 0.96900 * b[2] + w * 0.1538520;
    b[3] = 0.86650 * b[3] + w * 0.3104856;
    b[4] = 0.55000 * b[4] + w * 0.5329522;
    b[5] = -0.7616 * b[5] - w * 0.0168980;
    const double y = b[0] + b[1] + b[2] + b[3] + b[4] + b[5] + b[6] + w * 0.5362;
    b[6] = w * 0.115926;
    if (t >= kWarmup) out[t - kWarmup] = y;
  }
  return out;
}

std::vector<double> Excerpt(const std::vector<double>& source, std::size_t n,
                            NoiseColor color, std::mt19937_64& rng) {
  if (source.empty()) return GaussianNoise(n, color, rng);
  std::vector<double> out(n);
  std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
  const std::size_t offset = pick(rng);
  for (std::size_t t = 0; t < n; ++t) out[t] = source[(offset + t) % source.size()];
  return out;
}

std::vector<double> ConvolveTruncated(std::span<const double> x,
                                      std::span<const double> h) {
  auto y = internal::FftConvolve(x, h);
  y.resize(x.size());
  return y;
}

}  // namespace

std::mt19937_64 Substream(uint64_t seed, std::string_view name) {
  const uint64_t h = Fnv1a(name);
  std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(h),
                    uint32_t(h >> 32)};
  return std::mt19937_64(seq);
}

const std::vector<std::vector<double>>& ImpulseResponseSet::At(int az) const {
  auto it = responses.find(az);
  if (it == responses.end())
    throw InvalidArgument("impulse response for azimuth " + std::to_string(az) +
                          " is missing");
  return it->second;
}

int ImpulseResponseSet::num_channels() const {
  return responses.empty() ? 0 : int(responses.begin()->second.size());
}

std::size_t ImpulseResponseSet::length() const {
  return responses.empty() || responses.begin()->second.empty()
             ? 0
             : responses.begin()->second.front().size();
}

bool ImpulseResponseSet::HasAll(std::span<const int> azimuths) const {
  return std::all_of(azimuths.begin(), azimuths.end(),
                     [&](int az) { return Has(az); });
}

void ImpulseResponseSet::Validate() const {
  if (responses.empty()) throw InvalidArgument("empty impulse response set");
  const int channels = num_channels();
  const std::size_t len = length();
  if (channels == 0 || len == 0) throw InvalidArgument("empty impulse response");
  for (const auto& [az, chans] : responses) {
    if (int(chans.size()) != channels)
      throw InvalidArgument("impulse responses differ in channel count");
    for (const auto& h : chans) {
      if (h.size() != len)
        throw InvalidArgument("impulse responses differ in length");
      for (double x : h)
        if (!std::isfinite(x)) throw InvalidArgument("non-finite impulse response");
    }
  }
}

double RirEnvelope(double t, double rt60) {
  return std::exp(-3.0 * kLn10 * t / rt60);
}

ImpulseResponseSet SynthRir(double rt60, int n_mics, std::size_t length,
                            uint64_t seed, const SyntheticRirOptions& opt) {
  if (!(rt60 > 0.0)) throw InvalidArgument("rt60 must be positive");
  if (n_mics < 1 || length < 2) throw InvalidArgument("invalid RIR geometry");
  const double fs = opt.sample_rate;
  constexpr int kHalfWidth = 16;

  // Expected tail energy for unit gain, to set the direct-to-reverberant
  // ratio. The tail starts right after the direct-path onset.
  const double onset = opt.source_distance_m / opt.speed_of_sound * fs;
  const std::size_t tail_start = std::size_t(std::ceil(onset)) + 1;
  double tail_energy = 0.0;
  for (std::size_t i = tail_start; i < length; ++i)
    tail_energy += std::pow(RirEnvelope(double(i) / fs, rt60), 2);
  const double gain =
      tail_energy > 0.0 ? std::sqrt(std::pow(10.0, -opt.drr_db / 10.0) / tail_energy)
                        : 0.0;

  ImpulseResponseSet set;
  set.sample_rate = fs;
  for (int az : opt.azimuths) {
    const double theta = az * std::numbers::pi / 180.0;
    std::vector<std::vector<double>> chans;
    for (int m = 0; m < n_mics; ++m) {
      std::vector<double> h(length, 0.0);
      const double delay =
          onset + m * opt.mic_spacing_m * std::sin(theta) / opt.speed_of_sound * fs;
      // Hann-windowed sinc, normalized to unit DC gain.
      std::vector<std::pair<long, double>> kernel;
      double sum = 0.0;
      const long center = std::lround(delay);
      for (long i = center - kHalfWidth; i <= center + kHalfWidth; ++i) {
        const double x = double(i) - delay;
        const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double win = 0.5 + 0.5 * std::cos(std::numbers::pi * x / (kHalfWidth + 1));
        kernel.emplace_back(i, sinc * win);
        sum += sinc * win;
      }
      for (auto [i, c] : kernel)
        if (i >= 0 && i < long(length)) h[i] += c / sum;

      auto rng = Substream(seed, "rir/az" + std::to_string(az) + "/ch" +
                                     std::to_string(m));
      std::normal_distribution<double> gauss;
      for (std::size_t i = tail_start; i < length; ++i)
        h[i] += gain * gauss(rng) * RirEnvelope(double(i) / fs, rt60);
      chans.push_back(std::move(h));
    }
    set.responses[az] = std::move(chans);
  }
  return set;
}

MotionLaw MotionLaw::Random(std::size_t num_samples, uint64_t seed,
                            int segment_length, int block_length,
                            bool per_sample) {
  if (segment_length < 1 || block_length < 1)
    throw InvalidArgument("motion law lengths must be positive");
  MotionLaw law;
  law.segment_length = segment_length;
  law.block_length = block_length;
  law.per_sample = per_sample;
  auto rng = Substream(seed, "motion");
  std::normal_distribution<double> gauss;
  law.betas.resize(num_samples / segment_length + 2);
  for (auto& b : law.betas) b = gauss(rng);
  return law;
}

double MotionLaw::Alpha(std::size_t position) const {
  if (betas.empty()) return 0.0;
  if (!per_sample) position -= position % std::size_t(block_length);
  const std::size_t L = segment_length;
  const std::size_t b = position / L;
  const std::size_t l = position % L;
  const double lo = betas[std::min(b, betas.size() - 1)];
  const double hi = betas[std::min(b + 1, betas.size() - 1)];
  return double(L - l) / double(L) * lo + double(l) / double(L) * hi;
}

bool MotionLaw::IsStatic() const {
  return std::all_of(betas.begin(), betas.end(), [](double b) { return b == 0.0; });
}

BlendWeights BlendWeightsFor(double alpha) {
  return {1.0 - std::abs(alpha), std::max(0.0, alpha), std::max(0.0, -alpha)};
}

std::vector<std::vector<double>> TimeVaryingAtf(const ImpulseResponseSet& irs,
                                                const MotionLaw& law,
                                                std::size_t position) {
  const auto& a0 = irs.At(0);
  const auto& a15 = irs.At(15);
  const auto& a345 = irs.At(345);
  const BlendWeights w = BlendWeightsFor(law.Alpha(position));
  auto out = a0;
  for (std::size_t m = 0; m < out.size(); ++m)
    for (std::size_t i = 0; i < out[m].size(); ++i)
      out[m][i] = w.center * a0[m][i] + w.right * a15[m][i] + w.left * a345[m][i];
  return out;
}

Waveform ConvolveTimeVarying(const Waveform& source,
                             const ImpulseResponseSet& irs,
                             const MotionLaw& law) {
  source.Validate();
  if (source.num_channels() != 1)
    throw InvalidArgument("source must be single channel");
  irs.Validate();
  if (source.num_samples() < irs.length())
    throw InvalidArgument("source is shorter than the impulse response");
  const std::size_t n = source.num_samples();
  const int channels = irs.num_channels();
  const auto& s = source.channels.front();
  Waveform out = Waveform::Zeros(channels, n, source.sample_rate);

  // The blended response is linear in the three azimuth responses, so the
  // output is the per-sample blend of three fixed convolutions.
  if (law.IsStatic()) {
    const auto& a0 = irs.At(0);
    for (int m = 0; m < channels; ++m) out.channels[m] = ConvolveTruncated(s, a0[m]);
    return out;
  }
  const auto& a0 = irs.At(0);
  const auto& a15 = irs.At(15);
  const auto& a345 = irs.At(345);
  for (int m = 0; m < channels; ++m) {
    const auto y0 = ConvolveTruncated(s, a0[m]);
    const auto y15 = ConvolveTruncated(s, a15[m]);
    const auto y345 = ConvolveTruncated(s, a345[m]);
    auto& y = out.channels[m];
    for (std::size_t t = 0; t < n; ++t) {
      const BlendWeights w = BlendWeightsFor(law.Alpha(t));
      y[t] = w.center * y0[t] + w.right * y15[t] + w.left * y345[t];
    }
  }
  return out;
}

double MeasureSnrDb(const Waveform& clean, const Waveform& noise) {
  return 10.0 * std::log10(Power(clean) / Power(noise));
}

double NoiseScale(const Waveform& clean, const Waveform& noise, double snr_db) {
  clean.Validate();
  noise.Validate();
  if (!std::isfinite(snr_db)) throw InvalidArgument("SNR must be finite");
  if (clean.num_channels() != noise.num_channels())
    throw InvalidArgument("clean and noise channel counts differ");
  if (noise.empty()) throw InvalidArgument("empty noise signal");
  const double ps = Power(clean);
  if (!(ps > 0.0)) throw InvalidArgument("clean signal is silent; SNR undefined");
  const double pn = Power(Fit(noise, clean.num_samples()));
  if (!(pn > 0.0)) throw InvalidArgument("noise signal is silent");
  return std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
}

Waveform MixNoise(const Waveform& clean, const Waveform& noise, double snr_db) {
  const double g = NoiseScale(clean, noise, snr_db);
  const Waveform fitted = Fit(noise, clean.num_samples());
  Waveform out = clean;
  for (std::size_t c = 0; c < out.num_channels(); ++c)
    for (std::size_t t = 0; t < out.num_samples(); ++t)
      out.channels[c][t] += g * fitted.channels[c][t];
  return out;
}

NoiseField MakeNoiseField(const ImpulseResponseSet& irs,
                          std::size_t num_samples, uint64_t seed,
                          const std::vector<double>& source_noise,
                          NoiseColor color) {
  const int channels = irs.num_channels();
  NoiseField field{Waveform::Zeros(channels, num_samples, irs.sample_rate), ""};
  auto rng = Substream(seed, "noise");
  if (irs.HasAll(kDiffuseAzimuths)) {
    field.kind = "diffuse-13-azimuth";
    for (int az : kDiffuseAzimuths) {
      const auto excerpt = Excerpt(source_noise, num_samples, color, rng);
      const auto& h = irs.At(az);
      for (int m = 0; m < channels; ++m) {
        const auto y = ConvolveTruncated(excerpt, h[m]);
        for (std::size_t t = 0; t < num_samples; ++t) field.noise.channels[m][t] += y[t];
      }
    }
  } else {
    field.kind = "uncorrelated";
    for (int m = 0; m < channels; ++m)
      field.noise.channels[m] = Excerpt(source_noise, num_samples, color, rng);
  }
  return field;
}

namespace {

// Two-pole resonator with unit peak gain, coefficients updated per sample.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double Step(double x, double freq, double bandwidth, double fs) {
    const double r = std::exp(-std::numbers::pi * bandwidth / fs);
    const double c = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double y = (1.0 - r) * x + c * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

Waveform SpeechLikeSource(double seconds, double fs, uint64_t seed) {
  if (!(seconds > 0.0) || !(fs > 0.0))
    throw InvalidArgument("duration and sample rate must be positive");
  const std::size_t n = std::size_t(std::llround(seconds * fs));
  Waveform w = Waveform::Zeros(1, n, fs);
  auto& out = w.channels.front();
  auto rng = Substream(seed, "source");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss;
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

  std::size_t t = std::size_t(range(0.05, 0.15) * fs);
  while (t < n) {
    const std::size_t len = std::size_t(range(0.12, 0.35) * fs);
    const double amp = range(0.3, 1.0);
    const std::size_t ramp = std::size_t(0.02 * fs);
    const bool voiced = uni(rng) < 0.8;
    Resonator f1, f2, f3;
    if (voiced) {
      const double pitch0 = range(90.0, 220.0);
      const double pitch1 = pitch0 * range(0.8, 1.2);
      const double a1 = range(300, 850), b1 = range(300, 850);
      const double a2 = range(850, 2400), b2 = range(850, 2400);
      const double a3 = range(2300, 3200), b3 = range(2300, 3200);
      double phase = 0.0, glottal = 0.0;
      for (std::size_t i = 0; i < len && t + i < n; ++i) {
        const double u = double(i) / len;
        phase += (pitch0 + (pitch1 - pitch0) * u) / fs;
        double pulse = 0.0;
        if (phase >= 1.0) {
          phase -= 1.0;
          pulse = 1.0;
        }
        glottal = 0.96 * glottal + pulse + 0.02 * gauss(rng);
        double y = f1.Step(glottal, a1 + (b1 - a1) * u, 90.0, fs);
        y = f2.Step(y, a2 + (b2 - a2) * u, 120.0, fs) * 4.0 + y;
        y += f3.Step(glottal, a3 + (b3 - a3) * u, 200.0, fs) * 0.5;
        const double edge = std::min({1.0, double(i) / ramp, double(len - i) / ramp});
        out[t + i] = amp * edge * edge * y;
      }
    } else {
      const double centre = range(2500, 6000);
      for (std::size_t i = 0; i < len && t + i < n; ++i) {
        const double y = f1.Step(gauss(rng), centre, 1500.0, fs);
        const double edge = std::min({1.0, double(i) / ramp, double(len - i) / ramp});
        out[t + i] = 0.5 * amp * edge * edge * y;
      }
    }
    t += len + std::size_t(range(0.04, 0.2) * fs);
  }
  const double peak = std::abs(*std::max_element(
      out.begin(), out.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
  if (peak > 0.0)
    for (auto& x : out) x *= 0.5 / peak;
  return w;
}

const char* ScenarioName(AtfScenario s) {
  return s == AtfScenario::kTimeVarying ? "time-varying" : "time-invariant";
}

const char* NoiseColorName(NoiseColor c) {
  return c == NoiseColor::kWhite ? "white" : "pink";
}

NoiseColor ParseNoiseColor(const std::string& name) {
  if (name == "white") return NoiseColor::kWhite;
  if (name == "pink") return NoiseColor::kPink;
  throw ConfigError("unknown noise color '" + name + "' (expected white or pink)");
}

AtfScenario ParseScenario(const std::string& name) {
  if (name == "time-invariant" || name == "ti") return AtfScenario::kTimeInvariant;
  if (name == "time-varying" || name == "tv") return AtfScenario::kTimeVarying;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected time-invariant or time-varying)");
}

void ScenarioConfig::Validate() const {
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
  if (rir_dir.empty() && !(rt60 > 0.0))
    throw ConfigError("rt60 must be positive for synthetic responses");
  if (n_mics < 1) throw ConfigError("n_mics must be >= 1");
  if (source_path.empty() && !(duration_s > 0.0))
    throw ConfigError("duration_s must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
  if (segment_length < 1 || block_length < 1)
    throw ConfigError("motion law lengths must be positive");
}

ImpulseResponseSet LoadImpulseResponses(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) throw MissingFileError(dir);
  ImpulseResponseSet set;
  bool first = true;
  for (int az = 0; az < 360; ++az) {
    char name[16];
    std::snprintf(name, sizeof(name), "az%03d.wav", az);
    const auto path = std::filesystem::path(dir) / name;
    if (!std::filesystem::exists(path)) continue;
    Waveform w = ReadWav(path.string());
    if (first) set.sample_rate = w.sample_rate;
    else if (w.sample_rate != set.sample_rate)
      throw InvalidArgument("impulse responses differ in sample rate");
    first = false;
    set.responses[az] = std::move(w.channels);
  }
  set.Validate();
  return set;
}

SimulatedMixture Simulate(const ScenarioConfig& cfg) {
  cfg.Validate();
  SimulatedMixture out;

  Waveform source;
  if (cfg.source_path.empty()) {
    source = SpeechLikeSource(cfg.duration_s, cfg.sample_rate, cfg.seed);
  } else {
    source = ReadWav(cfg.source_path).Channel(0);
  }

  ImpulseResponseSet irs;
  if (cfg.rir_dir.empty()) {
    SyntheticRirOptions opt;
    opt.sample_rate = source.sample_rate;
    opt.drr_db = cfg.drr_db;
    irs = SynthRir(cfg.rt60, cfg.n_mics,
                   std::size_t(std::llround(cfg.rir_length_s * source.sample_rate)),
                   cfg.seed, opt);
    out.rir_kind = "synthetic";
  } else {
    irs = LoadImpulseResponses(cfg.rir_dir);
    if (irs.sample_rate != source.sample_rate)
      throw InvalidArgument("impulse responses and source differ in sample rate");
    if (irs.num_channels() < cfg.n_mics)
      throw InvalidArgument("impulse responses have fewer channels than n_mics");
    for (auto& [az, chans] : irs.responses) chans.resize(cfg.n_mics);
    out.rir_kind = "files";
  }

  const MotionLaw law =
      cfg.scenario == AtfScenario::kTimeVarying
          ? MotionLaw::Random(source.num_samples(), cfg.seed, cfg.segment_length,
                              cfg.block_length, cfg.per_sample_blending)
          : MotionLaw::Static();
  out.reverberant = ConvolveTimeVarying(source, irs, law);

  std::vector<double> noise_source;
  if (!cfg.noise_path.empty()) noise_source = ReadWav(cfg.noise_path).channels.front();
  NoiseField field = MakeNoiseField(irs, source.num_samples(), cfg.seed, noise_source,
                                    cfg.noise_color);
  out.noise_kind = field.kind;
  out.mixture = MixNoise(out.reverberant, field.noise, cfg.snr_db);
  out.reference = std::move(source);
  return out;
}

}  // namespace tvcov
