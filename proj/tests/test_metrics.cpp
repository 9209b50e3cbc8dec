// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tvcov/error.hpp"
#include "tvcov/metrics.hpp"
#include "tvcov/simulate.hpp"

namespace tvcov {
namespace {

Waveform Mono(std::vector<double> x) {
  Waveform w;
  w.channels = {std::move(x)};
  return w;
}

std::vector<double> White(std::size_t n, uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = nd(rng);
  return x;
}

// x[n] = e[n] - a1 x[n-1] - a2 x[n-2]
std::vector<double> Ar2(std::size_t n, double a1, double a2, uint64_t seed) {
  auto e = White(n, seed);
  std::vector<double> x(n, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = e[t] - (t >= 1 ? a1 * x[t - 1] : 0.0) - (t >= 2 ? a2 * x[t - 2] : 0.0);
  return x;
}

std::vector<double> Speech(double seconds, uint64_t seed) {
  return SpeechLikeSource(seconds, 16000.0, seed).channels[0];
}

// Frame of length n starting at `start`, times a Hamming window.
std::vector<double> Hamming(const std::vector<double>& x, std::size_t start, int n) {
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i)
    f[i] = x[start + i] * (0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  return f;
}

// Autocorrelation-method LPC by solving the normal equations directly.
std::vector<double> LpcOracle(const std::vector<double>& frame, int p,
                              std::vector<double>* r_out = nullptr) {
  std::vector<double> r(p + 1, 0.0);
  for (int k = 0; k <= p; ++k)
    for (std::size_t n = k; n < frame.size(); ++n) r[k] += frame[n] * frame[n - k];
  CMatrix t(p, p);
  CVector rhs(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) t(i, j) = r[std::abs(i - j)];
    rhs(i) = -r[i + 1];
  }
  const CVector a = testing::GaussJordanInverse(t) * rhs;
  std::vector<double> out(p + 1, 1.0);
  for (int i = 0; i < p; ++i) out[i + 1] = a(i).real();
  if (r_out) *r_out = r;
  return out;
}

double Quadratic(const std::vector<double>& a, const std::vector<double>& r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      acc += a[i] * a[j] * r[i > j ? i - j : j - i];
  return acc;
}

TEST_CASE("metrics: identical signals") {
  const Waveform ref = Mono(Speech(2.0, 1));
  const Metrics m = Evaluate(ref, ref);
  CHECK(m.cd_db == 0.0);
  CHECK(m.llr == 0.0);
  CHECK(m.fwsegsnr_db == 35.0);
  CHECK(m.lag == 0);
  const Waveform white = Mono(White(16000, 2));
  CHECK(LogLikelihoodRatio(white, white) == 0.0);
}

TEST_CASE("metrics: gain") {
  const auto x = Speech(2.0, 3);
  std::vector<double> scaled = x;
  for (auto& v : scaled) v *= 3.7;
  CHECK(CepstrumDistance(Mono(x), Mono(scaled)) < 1e-8);
  CHECK(LogLikelihoodRatio(Mono(x), Mono(scaled)) < 1e-8);

  // both inputs scaled: every measure unchanged
  auto est = x;
  const auto n = White(x.size(), 4, 0.02);
  for (std::size_t t = 0; t < x.size(); ++t) est[t] += n[t];
  auto ref2 = x, est2 = est;
  for (auto& v : ref2) v *= 0.01;
  for (auto& v : est2) v *= 0.01;
  const Metrics a = Evaluate(Mono(x), Mono(est));
  const Metrics b = Evaluate(Mono(ref2), Mono(est2));
  CHECK(a.cd_db == doctest::Approx(b.cd_db).epsilon(1e-8));
  CHECK(a.llr == doctest::Approx(b.llr).epsilon(1e-8));
  CHECK(a.fwsegsnr_db == doctest::Approx(b.fwsegsnr_db).epsilon(1e-8));
  CHECK(a.cd_db > 0.0);
  CHECK(a.llr > 0.0);
}

TEST_CASE("metrics: LPC and cepstrum") {
  const auto x = Ar2(4000, -1.3, 0.6, 5);
  const auto frame = Hamming(x, 1000, 400);
  const auto a = Lpc(frame, 12);
  REQUIRE(a.has_value());
  const auto oracle = LpcOracle(frame, 12);
  for (int i = 0; i <= 12; ++i) CHECK(std::abs((*a)[i] - oracle[i]) < 1e-9);

  const auto c = LpcToCepstrum(*a, 24);
  const auto c_ref = testing::CepstrumFromLogSpectrum(*a, 24);
  for (int n = 0; n < 24; ++n) CHECK(std::abs(c[n] - c_ref[n]) < 1e-8);

  // first-order closed form: 1/(1 + a z^-1) has c_n = -(-a)^n / n ... sign as
  // log(1/(1 - b z^-1)) = sum b^n z^-n / n with b = -a
  const std::vector<double> one = {1.0, -0.5};
  const auto c1 = LpcToCepstrum(one, 6);
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(c1[n - 1] - std::pow(0.5, n) / n) < 1e-15);

  CHECK_FALSE(Lpc(std::vector<double>(400, 0.0), 12).has_value());
  const auto r = Autocorrelation(std::vector<double>{1.0, 2.0, 3.0}, 2);
  CHECK(r == std::vector<double>{14.0, 8.0, 3.0});
}

TEST_CASE("metrics: two-frame cepstrum distance against a direct evaluation") {
  // 400-sample frames every 160: 560 samples give exactly two frames.
  const auto ref = Ar2(560, -1.2, 0.5, 6);
  const auto est = Ar2(560, -0.4, 0.3, 7);
  const double cd = CepstrumDistance(Mono(ref), Mono(est));
  double expect = 0.0;
  for (std::size_t start : {0, 160}) {
    const auto cr = testing::CepstrumFromLogSpectrum(LpcOracle(Hamming(ref, start, 400), 12), 24);
    const auto ce = testing::CepstrumFromLogSpectrum(LpcOracle(Hamming(est, start, 400), 12), 24);
    double sq = 0.0;
    for (int d = 0; d < 24; ++d) sq += (cr[d] - ce[d]) * (cr[d] - ce[d]);
    expect += std::clamp(10.0 / std::log(10.0) * std::sqrt(2.0 * sq), 0.0, 10.0) / 2.0;
  }
  CHECK(expect > 0.5);
  CHECK(std::abs(cd - expect) < 1e-8);
}

TEST_CASE("metrics: AR(2) log-likelihood ratio against the quadratic forms") {
  const auto ref = Ar2(560, -1.5, 0.8, 8);
  const auto est = Ar2(560, 0.9, 0.3, 9);
  std::vector<double> values;
  for (std::size_t start : {0, 160}) {
    std::vector<double> r;
    const auto a_ref = LpcOracle(Hamming(ref, start, 400), 12, &r);
    const auto a_est = LpcOracle(Hamming(est, start, 400), 12);
    values.push_back(std::max(0.0, std::log(Quadratic(a_est, r) / Quadratic(a_ref, r))));
  }
  // two frames: the trimmed mean keeps floor(0.95 * 2) = 1, the smaller one
  const double expect = std::min(values[0], values[1]);
  int skipped = -1;
  const double llr = LogLikelihoodRatio(Mono(ref), Mono(est), {}, &skipped);
  CHECK(skipped == 0);
  CHECK(expect > 0.1);
  CHECK(std::abs(llr - expect) < 1e-8);
}

TEST_CASE("metrics: frequency-weighted SNR") {
  const auto x = Speech(3.0, 10);
  auto with_noise = [&](double rel_db, uint64_t seed) {
    double p = 0.0;
    for (double v : x) p += v * v;
    p /= double(x.size());
    const auto n = White(x.size(), seed, std::sqrt(p * std::pow(10.0, rel_db / 10.0)));
    auto y = x;
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += n[t];
    return Mono(y);
  };
  CHECK(FwSegSnr(Mono(x), with_noise(-60.0, 11)) > 30.0);
  double prev = 35.0;
  for (double level : {-50.0, -40.0, -30.0, -20.0, -10.0, 0.0, 10.0}) {
    const double s = FwSegSnr(Mono(x), with_noise(level, 12));
    CHECK(s <= prev);
    prev = s;
  }
  CHECK(FwSegSnr(Mono(x), Mono(White(x.size(), 13, 0.1))) < 0.0);
  const double floor = FwSegSnr(Mono(x), Mono(White(x.size(), 14, 0.1)));
  CHECK(floor >= -10.0);
}

TEST_CASE("metrics: alignment") {
  const auto x = Speech(2.0, 15);
  std::vector<double> late(x.size(), 0.0);
  for (std::size_t t = 37; t < x.size(); ++t) late[t] = x[t - 37];
  int lag = 0;
  const auto aligned = AlignToReference(x, late, 4000, &lag);
  CHECK(lag == 37);
  CHECK(aligned.size() == x.size());
  for (std::size_t t = 0; t + 37 < x.size(); ++t) CHECK(aligned[t] == late[t + 37]);
  const Metrics m = Evaluate(Mono(x), Mono(late));
  CHECK(m.lag == 37);
  CHECK(m.fwsegsnr_db > 30.0);
}

TEST_CASE("metrics: errors") {
  CHECK_THROWS_AS(CepstrumDistance(Mono(White(100, 1)), Mono(White(100, 2))), InvalidArgument);
  Waveform two;
  two.channels = {White(1000, 1), White(1000, 2)};
  CHECK_THROWS_AS(FwSegSnr(two, two), InvalidArgument);
  Waveform other_rate = Mono(White(8000, 3));
  other_rate.sample_rate = 8000.0;
  CHECK_THROWS_AS(Evaluate(Mono(White(8000, 3)), other_rate), InvalidArgument);
}

TEST_CASE("metrics: csv and summary") {
  std::vector<MetricsRow> rows = {
      {"u1", "time-varying", "proposed2", {1.0, 0.5, 10.0, 0, 0}},
      {"u2", "time-varying", "proposed2", {3.0, 0.7, 12.0, 0, 0}},
      {"u1", "time-varying", "tiv", {2.0, 0.6, 9.0, 0, 0}},
  };
  const auto summary = SummarizeMetrics(rows);
  REQUIRE(summary.size() == 2);
  CHECK(summary[0].utterance == "mean");
  CHECK(summary[0].method == "proposed2");
  CHECK(summary[0].metrics.cd_db == 2.0);
  CHECK(summary[0].metrics.llr == doctest::Approx(0.6));
  CHECK(summary[0].metrics.fwsegsnr_db == 11.0);
  CHECK(summary[1].method == "tiv");

  std::ostringstream os;
  WriteMetricsCsv(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "utterance,scenario,method,cd_db,llr,fwsegsnr_db");
  std::getline(in, line);
  CHECK(line.rfind("u1,time-varying,proposed2,1", 0) == 0);
}

}  // namespace
}  // namespace tvcov
