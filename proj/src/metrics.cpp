// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "fft.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

constexpr double kLn10 = 2.302585092994046;

struct Framing {
  int length = 0;
  int shift = 0;
  int count = 0;
};

Framing MakeFraming(std::size_t n, double fs, const MetricOptions& opt) {
  Framing f;
  f.length = int(std::lround(opt.frame_ms * 1e-3 * fs));
  f.shift = int(std::lround(opt.shift_ms * 1e-3 * fs));
  if (f.length < 2 || f.shift < 1) throw InvalidArgument("invalid metric framing");
  if (n < std::size_t(f.length))
    throw InvalidArgument("signal too short for one analysis frame");
  f.count = int((n - f.length) / f.shift) + 1;
  return f;
}

std::vector<double> Hamming(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

std::vector<double> Hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

const std::vector<double>& Mono(const Waveform& w, const char* what) {
  w.Validate();
  if (w.num_channels() != 1)
    throw InvalidArgument(std::string(what) + " must be single channel");
  return w.channels.front();
}

// est resized to the reference length.
std::vector<double> Conform(const std::vector<double>& est, std::size_t n) {
  std::vector<double> out(n, 0.0);
  std::copy_n(est.begin(), std::min(n, est.size()), out.begin());
  return out;
}

std::vector<double> WindowedFrame(const std::vector<double>& x, int index,
                                  const Framing& f,
                                  const std::vector<double>& window) {
  std::vector<double> out(f.length);
  const std::size_t start = std::size_t(index) * f.shift;
  for (int i = 0; i < f.length; ++i) out[i] = x[start + i] * window[i];
  return out;
}

// Indices of frames within active_range_db of the loudest reference frame.
std::vector<int> ActiveFrames(const std::vector<double>& ref, const Framing& f,
                              const MetricOptions& opt) {
  std::vector<double> energy(f.count);
  for (int l = 0; l < f.count; ++l) {
    double e = 0.0;
    for (int i = 0; i < f.length; ++i) {
      const double x = ref[std::size_t(l) * f.shift + i];
      e += x * x;
    }
    energy[l] = e;
  }
  const double top = *std::max_element(energy.begin(), energy.end());
  const double threshold = top * std::pow(10.0, -opt.active_range_db / 10.0);
  std::vector<int> active;
  for (int l = 0; l < f.count; ++l)
    if (energy[l] > 0.0 && energy[l] >= threshold) active.push_back(l);
  return active;
}

double QuadraticForm(std::span<const double> a, std::span<const double> r) {
  // a^T Toeplitz(r) a
  double acc = 0.0;
  const int p = int(a.size());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) acc += a[i] * r[std::abs(i - j)] * a[j];
  return acc;
}

double Mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double InverseMel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters evenly spaced on the mel scale, [band][bin].
std::vector<std::vector<double>> MelFilterbank(int bands, int fft_size, double fs) {
  const int bins = fft_size / 2 + 1;
  const double top = Mel(fs / 2.0);
  std::vector<double> edges(bands + 2);
  for (int i = 0; i < bands + 2; ++i) edges[i] = InverseMel(top * i / (bands + 1));
  std::vector<std::vector<double>> fb(bands, std::vector<double>(bins, 0.0));
  for (int b = 0; b < bands; ++b)
    for (int k = 0; k < bins; ++k) {
      const double hz = k * fs / fft_size;
      const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
      if (hz > lo && hz <= mid) fb[b][k] = (hz - lo) / (mid - lo);
      else if (hz > mid && hz < hi) fb[b][k] = (hi - hz) / (hi - mid);
    }
  return fb;
}

}  // namespace

std::vector<double> Autocorrelation(std::span<const double> frame, int max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  for (int lag = 0; lag <= max_lag; ++lag)
    for (std::size_t n = lag; n < frame.size(); ++n) r[lag] += frame[n] * frame[n - lag];
  return r;
}

std::optional<std::vector<double>> Lpc(std::span<const double> frame, int order) {
  const auto r = Autocorrelation(frame, order);
  if (!(r[0] > 0.0)) return std::nullopt;
  std::vector<double> a(order + 1, 0.0), prev(order + 1);
  a[0] = 1.0;
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    if (!(std::abs(k) < 1.0)) return std::nullopt;
    prev = a;
    for (int j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= 1.0 - k * k;
  }
  return a;
}

std::vector<double> LpcToCepstrum(std::span<const double> lpc, int count) {
  const int p = int(lpc.size()) - 1;
  auto coef = [&](int n) { return n <= p ? lpc[n] : 0.0; };
  std::vector<double> c(count + 1, 0.0);
  for (int n = 1; n <= count; ++n) {
    double acc = -coef(n);
    for (int k = 1; k < n; ++k) acc -= double(k) / n * c[k] * coef(n - k);
    c[n] = acc;
  }
  return {c.begin() + 1, c.end()};
}

std::vector<double> AlignToReference(std::span<const double> ref,
                                     std::span<const double> est, int max_lag,
                                     int* lag_out) {
  const auto xc = internal::CrossCorrelate(est, ref, max_lag);
  const int best = int(std::max_element(xc.begin(), xc.end()) - xc.begin()) - max_lag;
  if (lag_out) *lag_out = best;
  std::vector<double> out(ref.size(), 0.0);
  for (std::size_t n = 0; n < ref.size(); ++n) {
    const long src = long(n) + best;
    if (src >= 0 && src < long(est.size())) out[n] = est[src];
  }
  return out;
}

double CepstrumDistance(const Waveform& ref_w, const Waveform& est_w,
                        const MetricOptions& opt) {
  const auto& ref = Mono(ref_w, "reference");
  const auto est = Conform(Mono(est_w, "estimate"), ref.size());
  const Framing f = MakeFraming(ref.size(), ref_w.sample_rate, opt);
  const auto window = Hamming(f.length);
  const double scale = 10.0 / kLn10;
  double sum = 0.0;
  int used = 0;
  for (int l : ActiveFrames(ref, f, opt)) {
    const auto a_ref = Lpc(WindowedFrame(ref, l, f, window), opt.lpc_order);
    const auto a_est = Lpc(WindowedFrame(est, l, f, window), opt.lpc_order);
    if (!a_ref || !a_est) continue;
    const auto c_ref = LpcToCepstrum(*a_ref, opt.cepstrum_order);
    const auto c_est = LpcToCepstrum(*a_est, opt.cepstrum_order);
    double sq = 0.0;
    for (int d = 0; d < opt.cepstrum_order; ++d) sq += std::pow(c_ref[d] - c_est[d], 2);
    sum += std::clamp(scale * std::sqrt(2.0 * sq), 0.0, opt.cd_max_db);
    ++used;
  }
  return used ? sum / used : 0.0;
}

double LogLikelihoodRatio(const Waveform& ref_w, const Waveform& est_w,
                          const MetricOptions& opt, int* skipped_frames) {
  const auto& ref = Mono(ref_w, "reference");
  const auto est = Conform(Mono(est_w, "estimate"), ref.size());
  const Framing f = MakeFraming(ref.size(), ref_w.sample_rate, opt);
  const auto window = Hamming(f.length);
  std::vector<double> values;
  int skipped = 0;
  for (int l : ActiveFrames(ref, f, opt)) {
    const auto ref_frame = WindowedFrame(ref, l, f, window);
    const auto a_ref = Lpc(ref_frame, opt.lpc_order);
    const auto a_est = Lpc(WindowedFrame(est, l, f, window), opt.lpc_order);
    if (!a_ref || !a_est) {
      ++skipped;
      continue;
    }
    const auto r = Autocorrelation(ref_frame, opt.lpc_order);
    const double ratio = QuadraticForm(*a_est, r) / QuadraticForm(*a_ref, r);
    values.push_back(std::max(0.0, std::log(ratio)));
  }
  if (skipped_frames) *skipped_frames = skipped;
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t keep =
      std::max<std::size_t>(1, std::size_t(std::floor(opt.llr_keep * values.size())));
  double sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) sum += values[i];
  return sum / double(keep);
}

double FwSegSnr(const Waveform& ref_w, const Waveform& est_w,
                const MetricOptions& opt) {
  const auto& ref = Mono(ref_w, "reference");
  const auto est = Conform(Mono(est_w, "estimate"), ref.size());
  const Framing f = MakeFraming(ref.size(), ref_w.sample_rate, opt);
  int fft_size = 1;
  while (fft_size < 2 * f.length) fft_size <<= 1;
  internal::RealFft fft(fft_size);
  const auto window = Hann(f.length);
  const auto bank = MelFilterbank(opt.num_bands, fft_size, ref_w.sample_rate);
  std::vector<Complex> spec(fft.num_bins());
  std::vector<double> mag_ref(fft.num_bins()), mag_est(fft.num_bins());

  auto magnitude = [&](const std::vector<double>& frame, std::vector<double>& mag) {
    fft.Forward(frame, spec);
    double total = 0.0;
    for (int k = 0; k < fft.num_bins(); ++k) total += mag[k] = std::abs(spec[k]);
    if (total > 0.0)
      for (auto& m : mag) m /= total;
  };

  double sum = 0.0;
  int used = 0;
  for (int l : ActiveFrames(ref, f, opt)) {
    magnitude(WindowedFrame(ref, l, f, window), mag_ref);
    magnitude(WindowedFrame(est, l, f, window), mag_est);
    double num = 0.0, den = 0.0;
    for (int b = 0; b < opt.num_bands; ++b) {
      double er = 0.0, ee = 0.0;
      for (int k = 0; k < fft.num_bins(); ++k) {
        er += bank[b][k] * mag_ref[k];
        ee += bank[b][k] * mag_est[k];
      }
      const double diff = er - ee;
      double snr = diff == 0.0 ? opt.snr_max_db
                               : 10.0 * std::log10(er * er / (diff * diff));
      snr = std::clamp(snr, opt.snr_min_db, opt.snr_max_db);
      const double weight = std::pow(er, opt.band_gamma);
      num += weight * snr;
      den += weight;
    }
    if (den > 0.0) {
      sum += num / den;
      ++used;
    }
  }
  return used ? sum / used : opt.snr_min_db;
}

Metrics Evaluate(const Waveform& ref, const Waveform& est,
                 const MetricOptions& opt) {
  ref.Validate();
  est.Validate();
  if (ref.num_channels() == 0 || est.num_channels() == 0)
    throw InvalidArgument("metrics need at least one channel");
  if (ref.sample_rate != est.sample_rate)
    throw InvalidArgument("reference and estimate differ in sample rate");
  Metrics m;
  const Waveform r = ref.Channel(0);
  Waveform e = est.Channel(0);
  const int max_lag = int(std::lround(opt.max_lag_s * ref.sample_rate));
  e.channels.front() =
      AlignToReference(r.channels.front(), e.channels.front(), max_lag, &m.lag);
  m.cd_db = CepstrumDistance(r, e, opt);
  m.llr = LogLikelihoodRatio(r, e, opt, &m.llr_skipped);
  m.fwsegsnr_db = FwSegSnr(r, e, opt);
  return m;
}

void WriteMetricsCsv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << "utterance,scenario,method,cd_db,llr,fwsegsnr_db\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& r : rows)
    os << r.utterance << ',' << r.scenario << ',' << r.method << ','
       << r.metrics.cd_db << ',' << r.metrics.llr << ',' << r.metrics.fwsegsnr_db
       << '\n';
  os.flags(flags);
  os.precision(precision);
}

std::vector<MetricsRow> SummarizeMetrics(const std::vector<MetricsRow>& rows) {
  std::vector<MetricsRow> out;
  std::vector<int> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const MetricsRow& s) {
      return s.scenario == r.scenario && s.method == r.method;
    });
    if (it == out.end()) {
      out.push_back({"mean", r.scenario, r.method, {}});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const std::size_t i = std::size_t(it - out.begin());
    it->metrics.cd_db += r.metrics.cd_db;
    it->metrics.llr += r.metrics.llr;
    it->metrics.fwsegsnr_db += r.metrics.fwsegsnr_db;
    ++counts[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].metrics.cd_db /= counts[i];
    out[i].metrics.llr /= counts[i];
    out[i].metrics.fwsegsnr_db /= counts[i];
  }
  return out;
}

}  // namespace tvcov
