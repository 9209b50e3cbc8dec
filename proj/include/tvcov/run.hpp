// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_RUN_HPP_
#define TVCOV_RUN_HPP_

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "tvcov/metrics.hpp"
#include "tvcov/model.hpp"
#include "tvcov/pipeline.hpp"
#include "tvcov/simulate.hpp"
#include "tvcov/wav.hpp"

namespace tvcov {

const char* Version();

enum class Command { kSimulate, kDereverb, kEvaluate, kBench };
const char* CommandName(Command c);
Command ParseCommand(const std::string& name);

struct IoConfig {
  std::string input;       // dereverb: mixture, evaluate: estimate
  std::string output;      // simulate/dereverb WAV, evaluate CSV
  std::string reference;   // evaluate: clean reference
  std::string checkpoint;  // dereverb: optional model dump
  std::string cost_csv;    // dereverb: defaults to <output stem>.cost.csv
  std::string output_dir;  // bench
  bool downmix = false;    // dereverb: write the channel mean
  WavFormat format = WavFormat::kFloat32;
};

struct BenchConfig {
  int seeds = 5;  // scenario.seed, scenario.seed + 1, ...
  std::vector<Method> methods = {Method::kProposed2, Method::kProposed1,
                                 Method::kTiv};
  std::vector<AtfScenario> scenarios = {AtfScenario::kTimeInvariant,
                                        AtfScenario::kTimeVarying};
};

// Model settings are given as for proposed2; the method decides the stacked
// structure (see ConfigureMethod) when the run starts.
struct RunConfig {
  Command command = Command::kDereverb;
  Method method = Method::kProposed2;
  ModelConfig model;
  StftConfig stft;
  ScenarioConfig scenario;
  IoConfig io;
  BenchConfig bench;
  int threads = 0;  // 0: hardware concurrency

  // Throws ConfigError.
  void Validate() const;
  // Model config after the method's structure is applied.
  ModelConfig EffectiveModel() const;
};

// Nested JSON text with sections model, stft, scenario, io, bench.
std::string ConfigToJson(const RunConfig& cfg);
// Unknown keys and mistyped values throw ConfigError. Absent keys keep the
// values already in `base`.
RunConfig ConfigFromJson(const std::string& text, const RunConfig& base = {});

// Defaults, then the JSON file at `path` (if non-empty), then overrides of
// the form section.key=value. A value that parses as JSON is used as such,
// anything else as a string.
RunConfig ResolveConfig(const std::string& path,
                        const std::vector<std::string>& overrides);

struct BenchResult {
  std::vector<MetricsRow> rows;     // one per utterance and method
  std::vector<MetricsRow> summary;  // means per scenario and method
  std::string noise_kind;
  std::string rir_kind;
};

// Simulate + dereverb + evaluate for every scenario, seed and method. The
// unprocessed mixture is reported as method "unprocessed". Progress lines go
// to `log` when given.
BenchResult RunBench(const RunConfig& cfg, std::ostream* log = nullptr);

// Table with the columns PESQ, CD, LLR, FWSegSNR per scenario; PESQ is n/a.
void WriteSummaryTable(std::ostream& os, const std::vector<MetricsRow>& summary);

// Runs the configured command and writes its artifacts. Exceptions
// propagate; see ExitCode.
void Run(const RunConfig& cfg, std::ostream* log = nullptr);

// 1 configuration, 2 missing file, 3 numerical breakdown.
int ExitCode(const std::exception& e);

}  // namespace tvcov

#endif  // TVCOV_RUN_HPP_
