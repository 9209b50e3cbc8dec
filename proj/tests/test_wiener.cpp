// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tvcov/error.hpp"
#include "tvcov/optimizer.hpp"
#include "tvcov/wiener.hpp"

namespace tvcov {
namespace {

using testing::RandomComplex;

SpectrogramTensor Tensor(int frames, int channels, std::mt19937_64& rng) {
  SpectrogramTensor s(frames, channels, 16, 8, 0);
  std::normal_distribution<double> nd;
  for (auto& c : s.data()) c = Complex(nd(rng), nd(rng));
  return s;
}

ModelConfig Config(int taps, int stack) {
  ModelConfig cfg;
  cfg.tap_length = taps;
  cfg.stack_length = stack;
  cfg.n_iterations = 4;
  return cfg;
}

TEST_CASE("wiener: noiseless single tap passes the input through") {
  std::mt19937_64 rng(61);
  FrequencyModel m = testing::RandomModel(2, 1, 1, 10, rng);
  m.noise_covariance = 1e-12 * CMatrix::Identity(2, 2);
  const CMatrix obs = RandomComplex(2, 10, rng);
  for (int l = 0; l < 10; ++l) {
    const CVector y = WienerFrame(m, obs, l);
    CHECK((y - obs.col(l)).norm() < 1e-6 * obs.col(l).norm());
  }
}

TEST_CASE("wiener: silent frames give exact zeros") {
  std::mt19937_64 rng(62);
  FrequencyModel m = testing::RandomModel(2, 3, 3, 8, rng);
  m.source_variance[5] = 0.0;
  const CMatrix obs = RandomComplex(6, 8, rng);
  CHECK(WienerFrame(m, obs, 5) == CVector::Zero(2));

  const auto s = Tensor(8, 2, rng);
  std::vector<FrequencyModel> models(s.num_bins(), m);
  const auto out = ApplyFilter(models, s, Config(3, 3));
  for (int k = 0; k < s.num_bins(); ++k)
    for (int c = 0; c < 2; ++c) CHECK(out.at(5, k, c) == Complex(0.0, 0.0));
}

TEST_CASE("wiener: fitted filter matches a dense re-evaluation") {
  std::mt19937_64 rng(63);
  for (auto [taps, stack] : {std::pair{1, 1}, {3, 1}, {3, 3}, {1, 4}}) {
    const auto s = Tensor(30, 2, rng);
    const ModelConfig cfg = Config(taps, stack);
    const auto fit = Iterate(s, cfg);
    REQUIRE(fit.failures.empty());
    const auto out = ApplyFilter(fit.models, s, cfg);
    CHECK(out.SameGeometry(s));
    for (int k = 0; k < s.num_bins(); k += 2) {
      const FrequencyModel& m = fit.models[k];
      const CMatrix obs = StackFrequency(s, k, stack);
      for (int l = 0; l < 30; ++l) {
        const CMatrix r = testing::DenseMixture(m, l);
        const CVector full = m.source_variance[l] * m.tap_covariances[0] *
                             testing::GaussJordanInverse(r) * obs.col(l);
        for (int c = 0; c < 2; ++c)
          CHECK(std::abs(out.at(l, k, c) - full(c)) <= 1e-10 * full.norm() + 1e-300);
        CHECK((WienerFrame(m, obs, l) - full.head(2)).norm() <= 1e-10 * full.norm());
      }
    }
  }
}

TEST_CASE("wiener: output covariance shrinks") {
  std::mt19937_64 rng(64);
  const auto s = Tensor(30, 2, rng);
  const ModelConfig cfg = Config(3, 3);
  const auto fit = Iterate(s, cfg);
  for (const auto& m : fit.models)
    for (int l = 0; l < m.num_frames(); ++l) {
      const double v = m.source_variance[l];
      const CMatrix& r0 = m.tap_covariances[0];
      const CMatrix out = v * v * r0 * HermitianInverse(AssembleMixtureCovariance(m, l)) * r0;
      CHECK(out.trace().real() <= v * r0.trace().real() * (1.0 + 1e-12));
    }
}

TEST_CASE("wiener: filter is linear in the observation") {
  std::mt19937_64 rng(65);
  const auto a = Tensor(20, 2, rng), b = Tensor(20, 2, rng);
  const ModelConfig cfg = Config(2, 2);
  const auto models = Iterate(a, cfg).models;
  SpectrogramTensor mix = a;
  const Complex ca(0.3, -1.1), cb(2.0, 0.5);
  for (std::size_t i = 0; i < mix.data().size(); ++i)
    mix.data()[i] = ca * a.data()[i] + cb * b.data()[i];
  const auto ya = ApplyFilter(models, a, cfg), yb = ApplyFilter(models, b, cfg);
  const auto ym = ApplyFilter(models, mix, cfg);
  for (std::size_t i = 0; i < ym.data().size(); ++i) {
    const Complex expect = ca * ya.data()[i] + cb * yb.data()[i];
    CHECK(std::abs(ym.data()[i] - expect) <= 1e-10 * (1.0 + std::abs(expect)));
  }
}

TEST_CASE("wiener: geometry mismatch") {
  std::mt19937_64 rng(66);
  const auto s = Tensor(10, 2, rng);
  const ModelConfig cfg = Config(2, 2);
  auto models = Iterate(s, cfg).models;
  CHECK_THROWS_AS(ApplyFilter({models.begin(), models.end() - 1}, s, cfg), InvalidArgument);
  CHECK_THROWS_AS(ApplyFilter(models, Tensor(11, 2, rng), cfg), InvalidArgument);
  CHECK_THROWS_AS(ApplyFilter(models, s, Config(1, 1)), InvalidArgument);
  CHECK_THROWS_AS(WienerFrame(models[0], CMatrix::Zero(4, 10), 10), InvalidArgument);
}

}  // namespace
}  // namespace tvcov
