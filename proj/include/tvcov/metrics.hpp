// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_METRICS_HPP_
#define TVCOV_METRICS_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvcov/stft.hpp"

namespace tvcov {

// Analysis settings shared by the three measures. Defaults follow the
// conventional REVERB-challenge parameterization at 16 kHz.
struct MetricOptions {
  double frame_ms = 25.0;
  double shift_ms = 10.0;
  int lpc_order = 12;
  int cepstrum_order = 24;
  double cd_max_db = 10.0;
  // Fraction of frames (smallest values) kept for the LLR mean.
  double llr_keep = 0.95;
  int num_bands = 25;
  double band_gamma = 0.2;
  double snr_min_db = -10.0;
  double snr_max_db = 35.0;
  // Frames whose reference energy is more than this many dB below the
  // loudest reference frame are excluded from every average.
  double active_range_db = 40.0;
  // Search range of the global alignment.
  double max_lag_s = 0.25;
};

// LPC polynomial [1, a_1, ..., a_p] of an already windowed frame by the
// autocorrelation method (Levinson-Durbin). nullopt for a silent frame or a
// reflection coefficient with |k| >= 1.
std::optional<std::vector<double>> Lpc(std::span<const double> frame, int order);

// Autocorrelation r[0..max_lag] of a frame.
std::vector<double> Autocorrelation(std::span<const double> frame, int max_lag);

// Cepstrum c_1..c_count of 1/A(z) (gain term c_0 excluded).
std::vector<double> LpcToCepstrum(std::span<const double> lpc, int count);

// Shifts est by the lag that maximizes its cross-correlation with ref and
// trims or zero pads it to the reference length. Both signals mono.
std::vector<double> AlignToReference(std::span<const double> ref,
                                     std::span<const double> est, int max_lag,
                                     int* lag_out = nullptr);

// All three measures take mono waveforms of the same sample rate; est is
// trimmed or zero padded to the reference length (no alignment). They throw
// InvalidArgument when the reference is shorter than one frame.
double CepstrumDistance(const Waveform& ref, const Waveform& est,
                        const MetricOptions& opt = {});
double LogLikelihoodRatio(const Waveform& ref, const Waveform& est,
                          const MetricOptions& opt = {},
                          int* skipped_frames = nullptr);
double FwSegSnr(const Waveform& ref, const Waveform& est,
                const MetricOptions& opt = {});

struct Metrics {
  double cd_db = 0.0;
  double llr = 0.0;
  double fwsegsnr_db = 0.0;
  int lag = 0;
  int llr_skipped = 0;
};

// Aligns est (first channel) to ref (first channel) and computes all three.
Metrics Evaluate(const Waveform& ref, const Waveform& est,
                 const MetricOptions& opt = {});

struct MetricsRow {
  std::string utterance;
  std::string scenario;
  std::string method;
  Metrics metrics;
};

// Columns: utterance,scenario,method,cd_db,llr,fwsegsnr_db.
void WriteMetricsCsv(std::ostream& os, const std::vector<MetricsRow>& rows);

// Mean per (scenario, method) in first-appearance order, with utterance set
// to "mean".
std::vector<MetricsRow> SummarizeMetrics(const std::vector<MetricsRow>& rows);

}  // namespace tvcov

#endif  // TVCOV_METRICS_HPP_
