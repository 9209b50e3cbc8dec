// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// tvcov: simulate, dereverb, evaluate and bench from the command line.
//
//   tvcov simulate -o mix.wav --atf time-varying --seed 3
//   tvcov dereverb -i mix.wav -o out.wav --method proposed2
//   tvcov evaluate -i out.wav -r mix.reference.wav -o metrics.csv
//   tvcov bench --output-dir bench/ --seeds 5
//
// Every command also takes --config FILE (JSON) and any number of
// --set section.key=value overrides; flags win over both.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvcov/run.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> overrides;  // generated from the named flags
  bool print_config = false;
};

// Registers a flag that becomes the override key=value when given.
template <typename T>
void Bind(CLI::App* app, Flags* flags, const std::string& names,
          const std::string& key, const std::string& help) {
  app->add_option_function<T>(
         names,
         [flags, key](const T& v) {
           flags->overrides.push_back(key + "=" + nlohmann::json(v).dump());
         },
         help)
      ->type_name(std::is_same_v<T, std::string> ? "TEXT" : "NUM");
}

void BindList(CLI::App* app, Flags* flags, const std::string& names,
              const std::string& key, const std::string& help) {
  app->add_option_function<std::vector<std::string>>(
      names,
      [flags, key](const std::vector<std::string>& v) {
        flags->overrides.push_back(key + "=" + nlohmann::json(v).dump());
      },
      help);
}

void Common(CLI::App* app, Flags* flags) {
  app->add_option("-c,--config", flags->config, "JSON config file");
  app->add_option("--set", flags->sets, "Override, e.g. model.n_iterations=10");
  app->add_flag("--print-config", flags->print_config,
                "Print the resolved config and exit");
  Bind<int>(app, flags, "--threads", "threads", "Worker threads (0: all cores)");
}

void ScenarioFlags(CLI::App* app, Flags* flags) {
  Bind<std::string>(app, flags, "--atf", "scenario.atf",
                    "time-invariant or time-varying");
  Bind<long long>(app, flags, "--seed", "scenario.seed", "Scenario seed");
  Bind<double>(app, flags, "--rt60", "scenario.rt60", "Synthetic RT60 [s]");
  Bind<double>(app, flags, "--snr", "scenario.snr_db", "SNR [dB]");
  Bind<double>(app, flags, "--duration", "scenario.duration_s",
               "Synthetic source length [s]");
  Bind<std::string>(app, flags, "--source", "scenario.source", "Mono source WAV");
  Bind<std::string>(app, flags, "--noise", "scenario.noise", "Noise WAV");
  Bind<std::string>(app, flags, "--noise-color", "scenario.noise_color",
                    "Generated noise: pink or white");
  Bind<std::string>(app, flags, "--rir-dir", "scenario.rir_dir",
                    "Directory with az<deg>.wav responses");
}

void ModelFlags(CLI::App* app, Flags* flags) {
  Bind<std::string>(app, flags, "-m,--method", "method",
                    "proposed1, proposed2, tiv or nctf_mono");
  Bind<int>(app, flags, "--iterations", "model.n_iterations", "MM iterations");
  Bind<int>(app, flags, "--taps", "model.tap_length", "Tap count L_d");
  Bind<int>(app, flags, "--mics", "model.n_mics", "Channels used");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multichannel dereverberation with a time-varying covariance model"};
  app.set_version_flag("--version", tvcov::Version());
  app.require_subcommand(1);
  Flags flags;

  auto* simulate = app.add_subcommand("simulate", "Generate a reverberant noisy mixture");
  Common(simulate, &flags);
  Bind<std::string>(simulate, &flags, "-o,--output", "io.output", "Mixture WAV");
  Bind<std::string>(simulate, &flags, "--format", "io.format", "float32 or pcm16");
  ScenarioFlags(simulate, &flags);

  auto* dereverb = app.add_subcommand("dereverb", "Dereverberate a multichannel WAV");
  Common(dereverb, &flags);
  Bind<std::string>(dereverb, &flags, "-i,--input", "io.input", "Mixture WAV");
  Bind<std::string>(dereverb, &flags, "-o,--output", "io.output", "Output WAV");
  Bind<std::string>(dereverb, &flags, "--cost-csv", "io.cost_csv", "Cost trace CSV");
  Bind<std::string>(dereverb, &flags, "--checkpoint", "io.checkpoint",
                    "Write the fitted models as JSON");
  Bind<std::string>(dereverb, &flags, "--format", "io.format", "float32 or pcm16");
  dereverb->add_flag_callback(
      "--downmix", [&] { flags.overrides.push_back("io.downmix=true"); },
      "Write the mean of the output channels");
  ModelFlags(dereverb, &flags);

  auto* evaluate = app.add_subcommand("evaluate", "CD, LLR and FWSegSNR against a reference");
  Common(evaluate, &flags);
  Bind<std::string>(evaluate, &flags, "-i,--input", "io.input", "Estimate WAV");
  Bind<std::string>(evaluate, &flags, "-r,--reference", "io.reference", "Reference WAV");
  Bind<std::string>(evaluate, &flags, "-o,--output", "io.output", "Metrics CSV");
  Bind<std::string>(evaluate, &flags, "-m,--method", "method", "Method label");

  auto* bench = app.add_subcommand("bench", "Simulate, dereverb and evaluate over seeds");
  Common(bench, &flags);
  Bind<std::string>(bench, &flags, "-o,--output-dir", "io.output_dir", "Output directory");
  Bind<int>(bench, &flags, "--seeds", "bench.seeds", "Number of seeds");
  BindList(bench, &flags, "--methods", "bench.methods", "Methods to run");
  BindList(bench, &flags, "--scenarios", "bench.scenarios", "ATF scenarios");
  ScenarioFlags(bench, &flags);
  Bind<int>(bench, &flags, "--iterations", "model.n_iterations", "MM iterations");
  Bind<int>(bench, &flags, "--taps", "model.tap_length", "Tap count L_d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<std::string> overrides = {"command=\"" + command + "\""};
    overrides.insert(overrides.end(), flags.sets.begin(), flags.sets.end());
    overrides.insert(overrides.end(), flags.overrides.begin(), flags.overrides.end());
    const tvcov::RunConfig cfg = tvcov::ResolveConfig(flags.config, overrides);
    if (flags.print_config) {
      std::cout << tvcov::ConfigToJson(cfg);
      return 0;
    }
    tvcov::Run(cfg, &std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "tvcov: error: " << e.what() << "\n";
    return tvcov::ExitCode(e);
  }
  return 0;
}
