// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tvcov/checkpoint.hpp"
#include "tvcov/error.hpp"
#include "tvcov/wav.hpp"

namespace tvcov {
namespace {

Waveform Random(int channels, std::size_t n, uint64_t seed, double fs = 16000.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-0.9, 0.9);
  Waveform w = Waveform::Zeros(channels, n, fs);
  for (auto& c : w.channels)
    for (auto& x : c) x = ud(rng);
  return w;
}

TEST_CASE("wav: float32 round trip") {
  const auto dir = testing::ScratchDir("wav_f32");
  const Waveform w = Random(3, 1001, 1, 22050.0);
  const auto path = (dir / "a.wav").string();
  WriteWav(path, w, WavFormat::kFloat32);
  const Waveform r = ReadWav(path);
  CHECK(r.sample_rate == 22050.0);
  REQUIRE(r.num_channels() == 3);
  REQUIRE(r.num_samples() == 1001);
  for (int c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 1001; ++t)
      CHECK(r.channels[c][t] == double(float(w.channels[c][t])));
  // 44-byte canonical header plus interleaved samples
  CHECK(testing::Slurp(path).size() == 44 + 3 * 1001 * 4);
}

TEST_CASE("wav: pcm16 round trip and clipping") {
  const auto dir = testing::ScratchDir("wav_pcm");
  Waveform w = Random(2, 500, 2);
  w.channels[0][0] = 1.7;
  w.channels[1][0] = -3.0;
  const auto path = (dir / "b.wav").string();
  WriteWav(path, w, WavFormat::kPcm16);
  const Waveform r = ReadWav(path);
  CHECK(r.channels[0][0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(r.channels[1][0] == -1.0);
  for (int c = 0; c < 2; ++c)
    for (std::size_t t = 1; t < 500; ++t)
      CHECK(std::abs(r.channels[c][t] - w.channels[c][t]) <= 0.5 / 32768.0 + 1e-12);
}

TEST_CASE("wav: writes are deterministic") {
  const auto dir = testing::ScratchDir("wav_det");
  const Waveform w = Random(2, 300, 3);
  WriteWav((dir / "x.wav").string(), w);
  WriteWav((dir / "y.wav").string(), w);
  CHECK(testing::Slurp(dir / "x.wav") == testing::Slurp(dir / "y.wav"));
}

TEST_CASE("wav: errors") {
  const auto dir = testing::ScratchDir("wav_err");
  try {
    ReadWav((dir / "missing.wav").string());
    FAIL("expected MissingFileError");
  } catch (const MissingFileError& e) {
    CHECK(e.path() == (dir / "missing.wav").string());
    CHECK(std::string(e.what()).find("missing.wav") != std::string::npos);
  }
  {
    std::ofstream out(dir / "junk.wav", std::ios::binary);
    out << "definitely not a riff file, but long enough to have a header";
  }
  CHECK_THROWS_AS(ReadWav((dir / "junk.wav").string()), InvalidArgument);
  CHECK_THROWS_AS(WriteWav((dir / "e.wav").string(), Waveform{}), InvalidArgument);
}

TEST_CASE("checkpoint: round trip is exact") {
  std::mt19937_64 rng(4);
  std::vector<FrequencyModel> models;
  for (int k = 0; k < 3; ++k) models.push_back(testing::RandomModel(2, 3, 3, 7, rng));
  const auto text = SerializeModels(models);
  const auto back = DeserializeModels(text);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].n_mics == 2);
    CHECK(back[k].stack_length == 3);
    CHECK(back[k].source_variance == models[k].source_variance);
    CHECK(back[k].variance_floor == models[k].variance_floor);
    CHECK(HasTapZeroPattern(back[k]));
    for (int d = 0; d < 3; ++d) {
      // packed upper triangle; the lower half is the conjugate
      CHECK((back[k].tap_covariances[d] - models[k].tap_covariances[d]).norm() <=
            1e-15 * models[k].tap_covariances[d].norm());
    }
    CHECK((back[k].noise_covariance - models[k].noise_covariance).norm() <=
          1e-15 * models[k].noise_covariance.norm());
  }
  CHECK(SerializeModels(back) == text);

  const auto dir = testing::ScratchDir("checkpoint");
  SaveModels((dir / "m.json").string(), models);
  CHECK(SerializeModels(LoadModels((dir / "m.json").string())) == text);
  CHECK_THROWS_AS(LoadModels((dir / "none.json").string()), MissingFileError);
}

TEST_CASE("checkpoint: malformed documents") {
  CHECK_THROWS_AS(DeserializeModels("{"), InvalidArgument);
  CHECK_THROWS_AS(DeserializeModels(R"({"format":"other","version":1})"), InvalidArgument);
  CHECK_THROWS_AS(DeserializeModels(R"({"format":"tvcov-model","version":99})"),
                  InvalidArgument);
  std::mt19937_64 rng(5);
  auto text = SerializeModels({testing::RandomModel(1, 2, 2, 3, rng)});
  const auto pos = text.find("\"block\":2");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 9, "\"block\":1");
  CHECK_THROWS_AS(DeserializeModels(text), InvalidArgument);
}

}  // namespace
}  // namespace tvcov
