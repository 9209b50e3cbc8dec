// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any of them fails.
//
//   tvcov_acceptance --workdir DIR [--only 1,2,5] [--threads N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tvcov/hermitian.hpp"
#include "tvcov/metrics.hpp"
#include "tvcov/optimizer.hpp"
#include "tvcov/pipeline.hpp"
#include "tvcov/run.hpp"
#include "tvcov/simulate.hpp"
#include "tvcov/stft.hpp"
#include "tvcov/wav.hpp"

namespace tvcov {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double RelNorm(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// Convolutive synthetic data: s_l ~ CN(0, v_l) through random per-bin
// transfer functions of length `taps`, plus white sensor noise.
SpectrogramTensor SyntheticProblem(int n_mics, int taps, int frames, int bins,
                                   std::mt19937_64& rng) {
  SpectrogramTensor s(frames, n_mics, 2 * (bins - 1), bins - 1, 0);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int k = 0; k < bins; ++k) {
    std::vector<CMatrix> h(taps);
    for (int d = 0; d < taps; ++d) {
      h[d] = CMatrix(n_mics, 1);
      for (int m = 0; m < n_mics; ++m)
        h[d](m, 0) = Complex(nd(rng), nd(rng)) * std::pow(0.6, d);
    }
    std::vector<Complex> src(frames);
    for (auto& x : src) x = Complex(nd(rng), nd(rng)) * std::exp(2.0 * ud(rng));
    const double noise = 0.05 * (0.2 + ud(rng));
    for (int l = 0; l < frames; ++l)
      for (int m = 0; m < n_mics; ++m) {
        Complex acc(nd(rng) * noise, nd(rng) * noise);
        for (int d = 0; d < taps && d <= l; ++d) acc += h[d](m, 0) * src[l - d];
        s.at(l, k, m) = acc;
      }
  }
  return s;
}

// 1. Per-stage monotone descent of the total cost.
Outcome MonotoneDescent() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  const int kProblems = 50, kFrames = 50, kBins = 8, kIterations = 20;
  int checks = 0, violations = 0;
  double worst = 0.0;
  for (auto [taps, stack] : {std::pair{1, 1}, {6, 1}, {6, 6}}) {
    for (int p = 0; p < kProblems; ++p) {
      const SpectrogramTensor s = SyntheticProblem(2, 1 + p % 8, kFrames, kBins, rng);
      ModelConfig cfg;
      cfg.n_mics = 2;
      cfg.tap_length = taps;
      cfg.stack_length = stack;
      cfg.n_iterations = kIterations;
      // staged[i]: total cost after stage i, summed over bins
      std::vector<double> staged(1 + 4 * kIterations, 0.0);
      for (int k = 0; k < kBins; ++k) {
        const StackedObservations obs = StackFrequency(s, k, stack);
        int stage = 0;
        FitFrequency(obs, cfg, [&](int, UpdateStage, const FrequencyModel& m) {
          staged[stage++] += NegativeLogLikelihood(m, obs);
        });
      }
      for (std::size_t i = 1; i < staged.size(); ++i) {
        ++checks;
        const double rise = (staged[i] - staged[i - 1]) / std::abs(staged[i - 1]);
        worst = std::max(worst, rise);
        if (rise > 1e-8) ++violations;
      }
    }
  }
  const double t = Seconds(t0);
  return {violations == 0 && t < 120.0,
          Fmt("%.0f stage transitions, %.0f increases beyond 1e-8, worst relative rise %.2e, %.1f s",
              checks, violations, worst, t)};
}

// 2. Mono, unstacked trajectories against the scalar implementation.
Outcome ScalarEquivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  int problems = 0;
  for (int p = 0; p < 20; ++p) {
    const SpectrogramTensor s = SyntheticProblem(1, 1 + p % 6, 60, 2, rng);
    const StackedObservations obs = StackFrequency(s, 1, 1);
    std::vector<double> power(obs.cols());
    for (int l = 0; l < obs.cols(); ++l) power[l] = std::norm(obs(0, l));
    const testing::ScalarOracle oracle(power);
    ModelConfig cfg;
    cfg.n_mics = 1;
    cfg.tap_length = 6;
    cfg.stack_length = 1;
    cfg.n_iterations = 10;
    testing::ScalarState st;
    auto compare = [&](const FrequencyModel& m) {
      for (int l = 0; l < m.num_frames(); ++l)
        worst = std::max(worst, std::abs(m.source_variance[l] - st.v[l]) /
                                    std::max(std::abs(st.v[l]), 1e-300));
      for (int d = 0; d < m.tap_length(); ++d)
        worst = std::max(worst, std::abs(m.tap_covariances[d](0, 0).real() - st.r[d]) /
                                    std::max(st.r[d], 1e-300));
      worst = std::max(worst, std::abs(m.noise_covariance(0, 0).real() - st.rv) / st.rv);
    };
    FitFrequency(obs, cfg, [&](int, UpdateStage stage, const FrequencyModel& m) {
      switch (stage) {
        case UpdateStage::kInit:
          st.v = m.source_variance;
          st.r.clear();
          for (const auto& t : m.tap_covariances) st.r.push_back(t(0, 0).real());
          st.rv = m.noise_covariance(0, 0).real();
          st.floor = m.variance_floor;
          return;
        case UpdateStage::kSourceVariance: oracle.UpdateV(st); break;
        case UpdateStage::kTapCovariances: oracle.UpdateTaps(st); break;
        case UpdateStage::kNoiseCovariance: oracle.UpdateNoise(st); break;
        case UpdateStage::kRenormalize: testing::ScalarOracle::Renormalize(st); break;
      }
      compare(m);
    });
    ++problems;
  }
  const double t = Seconds(t0);
  return {worst < 1e-7 && t < 10.0,
          Fmt("%.0f problems x 10 iterations, worst relative deviation %.2e, %.2f s",
              problems, worst, t)};
}

// 3. Geometric-mean identities on random positive definite pairs.
Outcome GeometricMeanSuite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> ud(0.1, 10.0);
  double riccati = 0.0, idem = 0.0, sym = 0.0, scale = 0.0, cong = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + i % 12;
    const CMatrix a = testing::RandomPd(n, rng), b = testing::RandomPd(n, rng);
    const CMatrix g = GeometricMean(a, b);
    riccati = std::max(riccati, RelNorm(g * testing::GaussJordanInverse(a) * g, b));
    idem = std::max(idem, RelNorm(GeometricMean(a, a), a));
    sym = std::max(sym, RelNorm(GeometricMean(b, a), g));
    const double sa = ud(rng), sb = ud(rng);
    scale = std::max(scale, RelNorm(GeometricMean(sa * a, sb * b), std::sqrt(sa * sb) * g));
    const CMatrix m = testing::RandomComplex(n, n, rng) + 2.0 * CMatrix::Identity(n, n);
    const CMatrix ma = m * a * m.adjoint(), mb = m * b * m.adjoint();
    cong = std::max(cong, RelNorm(GeometricMean(ma, mb), m * g * m.adjoint()));
  }
  const double t = Seconds(t0);
  const double worst = std::max({idem, sym, scale, cong});
  return {riccati < 1e-9 && worst < 1e-9 && t < 30.0,
          Fmt("Riccati %.1e, idempotence %.1e, symmetry %.1e, scaling %.1e", riccati, idem,
              sym, scale) +
              Fmt(", congruence %.1e, %.2f s", cong, t)};
}

// 4. Model-matched statistics are fixed points of all three updates.
Outcome FixedPoints() {
  std::mt19937_64 rng(1004);
  double worst = 0.0;
  int cases = 0;
  for (auto [nm, taps, stack] : {std::tuple{1, 1, 1}, {1, 6, 1}, {2, 1, 1}, {2, 6, 1},
                                 {2, 3, 3}, {2, 6, 6}, {3, 4, 4}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const FrequencyModel m = testing::RandomModel(nm, taps, stack, 30, rng);
      std::vector<CMatrix> r;
      for (int l = 0; l < m.num_frames(); ++l) r.push_back(AssembleMixtureCovariance(m, l));
      const FactoredCovariances stats = FactorCovariances(r);
      const FrequencyModel v = UpdateSourceVariance(m, stats);
      for (int l = 0; l < m.num_frames(); ++l)
        worst = std::max(worst, std::abs(v.source_variance[l] - m.source_variance[l]) /
                                    m.source_variance[l]);
      const FrequencyModel t = UpdateTapCovariances(m, stats);
      for (int d = 0; d < taps; ++d)
        worst = std::max(worst, RelNorm(t.tap_covariances[d], m.tap_covariances[d]));
      const FrequencyModel n = UpdateNoiseCovariance(m, stats);
      worst = std::max(worst, RelNorm(n.noise_covariance, m.noise_covariance));
      ++cases;
    }
  }
  return {worst < 1e-9, Fmt("%.0f models, worst relative change %.2e", cases, worst)};
}

// 5. Analysis followed by synthesis.
Outcome StftRoundTrip() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  const StftConfig stft;
  for (int trial = 0; trial < 5; ++trial) {
    Waveform w = Waveform::Zeros(2, 32000, 16000.0);
    for (auto& c : w.channels)
      for (auto& x : c) x = nd(rng);
    const Waveform y = Synthesize(Analyze(w, stft.frame_size, stft.hop), 16000.0);
    for (int c = 0; c < 2; ++c)
      for (std::size_t t = stft.frame_size; t + stft.frame_size < w.num_samples(); ++t)
        worst = std::max(worst, std::abs(y.channels[c][t] - w.channels[c][t]));
  }
  return {worst < 1e-8, Fmt("5 signals, 2 ch x 2 s, max interior error %.2e", worst)};
}

struct Scores {
  double cd = 0.0, fw = 0.0;
};

Scores Mean(const std::vector<Metrics>& ms) {
  Scores s;
  for (const auto& m : ms) {
    s.cd += m.cd_db / double(ms.size());
    s.fw += m.fwsegsnr_db / double(ms.size());
  }
  return s;
}

Metrics Process(const SimulatedMixture& mix, Method method, int threads) {
  RunConfig rc;
  rc.method = method;
  DereverbResult r = Dereverberate(mix.mixture, rc.EffectiveModel(), rc.stft, threads);
  r.fit.ThrowIfFailed();
  return Evaluate(mix.reference, r.output);
}

// 6. Time-invariant scenario: proposed2 against the unprocessed mixture.
Outcome EndToEnd(int threads) {
  const auto t0 = Clock::now();
  std::vector<Metrics> unproc, proc;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig sc;
    sc.seed = seed;
    sc.scenario = AtfScenario::kTimeInvariant;
    const SimulatedMixture mix = Simulate(sc);
    unproc.push_back(Evaluate(mix.reference, mix.mixture));
    proc.push_back(Process(mix, Method::kProposed2, threads));
    std::cerr << "  [6] seed " << seed << ": unprocessed FW " << unproc.back().fwsegsnr_db
              << " CD " << unproc.back().cd_db << ", proposed2 FW " << proc.back().fwsegsnr_db
              << " CD " << proc.back().cd_db << "\n";
  }
  const Scores u = Mean(unproc), p = Mean(proc);
  return {p.fw - u.fw >= 1.0 && p.cd <= u.cd,
          Fmt("FWSegSNR %.2f -> %.2f dB, ", u.fw, p.fw) +
              Fmt("CD %.2f -> %.2f dB (5 seeds, 10 s), %.0f s", u.cd, p.cd, Seconds(t0))};
}

// 7. Time-varying scenario: ordering of the three structures.
Outcome TrendOrdering(int threads) {
  const auto t0 = Clock::now();
  std::vector<Metrics> p2, p1, tiv;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig sc;
    sc.seed = seed;
    sc.scenario = AtfScenario::kTimeVarying;
    const SimulatedMixture mix = Simulate(sc);
    p2.push_back(Process(mix, Method::kProposed2, threads));
    p1.push_back(Process(mix, Method::kProposed1, threads));
    tiv.push_back(Process(mix, Method::kTiv, threads));
    std::cerr << "  [7] seed " << seed << ": proposed2 " << p2.back().fwsegsnr_db
              << ", proposed1 " << p1.back().fwsegsnr_db << ", tiv " << tiv.back().fwsegsnr_db
              << "\n";
  }
  const double a = Mean(p2).fw, b = Mean(p1).fw, c = Mean(tiv).fw;
  return {a >= b && b >= c,
          Fmt("mean FWSegSNR proposed2 %.2f, proposed1 %.2f, tiv %.2f dB, %.0f s", a, b, c,
              Seconds(t0))};
}

// 8. Same configuration and seed, same bytes.
Outcome Determinism(const fs::path& workdir, int threads) {
  auto run = [&](const std::string& sub) {
    const fs::path dir = workdir / sub;
    fs::create_directories(dir);
    RunConfig sim = ResolveConfig("", {});
    sim.command = Command::kSimulate;
    sim.scenario.scenario = AtfScenario::kTimeVarying;
    sim.scenario.seed = 7;
    sim.io.output = (dir / "mix.wav").string();
    Run(sim);
    RunConfig bench = ResolveConfig("", {});
    bench.command = Command::kBench;
    bench.threads = threads;
    bench.bench.seeds = 1;
    bench.scenario.seed = 7;
    bench.scenario.duration_s = 3.0;
    bench.model.n_iterations = 5;
    bench.io.output_dir = (dir / "bench").string();
    Run(bench);
  };
  run("a");
  run("b");
  std::vector<std::string> compared, differing;
  for (const char* f : {"mix.wav", "mix.reference.wav", "bench/metrics.csv",
                        "bench/summary.csv", "bench/table.md"}) {
    compared.push_back(f);
    if (testing::Slurp(workdir / "a" / f) != testing::Slurp(workdir / "b" / f))
      differing.push_back(f);
  }
  std::string detail = std::to_string(compared.size()) + " artifacts compared";
  for (const auto& d : differing) detail += ", differs: " + d;
  return {differing.empty(), detail};
}

}  // namespace
}  // namespace tvcov

int main(int argc, char** argv) {
  CLI::App app{"tvcov acceptance checks"};
  std::string workdir = "acceptance_work";
  std::vector<int> only;
  int threads = 0;
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads (0: all cores)");
  CLI11_PARSE(app, argc, argv);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());

  namespace fs = std::filesystem;
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  using tvcov::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"monotone MM descent", tvcov::MonotoneDescent},
      {"scalar oracle equivalence", tvcov::ScalarEquivalence},
      {"geometric mean identities", tvcov::GeometricMeanSuite},
      {"fixed points", tvcov::FixedPoints},
      {"STFT round trip", tvcov::StftRoundTrip},
      {"end-to-end improvement", [&] { return tvcov::EndToEnd(threads); }},
      {"time-varying ordering", [&] { return tvcov::TrendOrdering(threads); }},
      {"determinism", [&] { return tvcov::Determinism(workdir, threads); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " ("
              << criteria[i].first << "): " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
