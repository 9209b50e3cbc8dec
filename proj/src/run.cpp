// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tvcov/checkpoint.hpp"
#include "tvcov/error.hpp"
#include "tvcov/optimizer.hpp"

namespace tvcov {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* FormatName(WavFormat f) {
  return f == WavFormat::kPcm16 ? "pcm16" : "float32";
}

WavFormat ParseFormat(const std::string& s) {
  if (s == "pcm16") return WavFormat::kPcm16;
  if (s == "float32") return WavFormat::kFloat32;
  throw ConfigError("unknown WAV format '" + s + "' (expected pcm16 or float32)");
}

// Reads section[key] into *out if present; the key is then removed so that
// leftovers can be reported as unknown.
template <typename T>
void Take(json& section, const char* key, T* out, const std::string& where) {
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    *out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key " + where + "." + key + " has the wrong type");
  }
  section.erase(it);
}

void RejectLeftovers(const json& section, const std::string& where) {
  if (section.empty()) return;
  throw ConfigError("unknown config key " +
                    (where.empty() ? "" : where + ".") + section.begin().key());
}

json Section(json& root, const char* name) {
  auto it = root.find(name);
  if (it == root.end()) return json::object();
  if (!it->is_object())
    throw ConfigError(std::string("config section ") + name + " must be an object");
  json s = *it;
  root.erase(it);
  return s;
}

json ToJsonTree(const RunConfig& c) {
  json methods = json::array();
  for (Method m : c.bench.methods) methods.push_back(MethodName(m));
  json scenarios = json::array();
  for (AtfScenario s : c.bench.scenarios) scenarios.push_back(ScenarioName(s));
  const auto& m = c.model;
  const auto& s = c.scenario;
  return {
      {"command", CommandName(c.command)},
      {"method", MethodName(c.method)},
      {"threads", c.threads},
      {"model",
       {{"n_mics", m.n_mics},
        {"tap_length", m.tap_length},
        {"stack_length", m.stack_length},
        {"n_iterations", m.n_iterations},
        {"pd_floor_rel", m.pd_floor_rel},
        {"variance_floor_rel", m.variance_floor_rel},
        {"noise_init_rel", m.noise_init_rel},
        {"tap_init_decay", m.tap_init_decay}}},
      {"stft", {{"frame_size", c.stft.frame_size}, {"hop", c.stft.hop}}},
      {"scenario",
       {{"source", s.source_path},
        {"noise", s.noise_path},
        {"noise_color", NoiseColorName(s.noise_color)},
        {"rir_dir", s.rir_dir},
        {"rt60", s.rt60},
        {"snr_db", s.snr_db},
        {"atf", ScenarioName(s.scenario)},
        {"seed", s.seed},
        {"n_mics", s.n_mics},
        {"duration_s", s.duration_s},
        {"sample_rate", s.sample_rate},
        {"rir_length_s", s.rir_length_s},
        {"drr_db", s.drr_db},
        {"segment_length", s.segment_length},
        {"block_length", s.block_length},
        {"per_sample_blending", s.per_sample_blending}}},
      {"io",
       {{"input", c.io.input},
        {"output", c.io.output},
        {"reference", c.io.reference},
        {"checkpoint", c.io.checkpoint},
        {"cost_csv", c.io.cost_csv},
        {"output_dir", c.io.output_dir},
        {"downmix", c.io.downmix},
        {"format", FormatName(c.io.format)}}},
      {"bench", {{"seeds", c.bench.seeds}, {"methods", methods}, {"scenarios", scenarios}}},
  };
}

RunConfig FromJsonTree(json root, RunConfig c) {
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  std::string name;
  name = CommandName(c.command);
  Take(root, "command", &name, "");
  c.command = ParseCommand(name);
  name = MethodName(c.method);
  Take(root, "method", &name, "");
  c.method = ParseMethod(name);
  Take(root, "threads", &c.threads, "");

  json model = Section(root, "model");
  Take(model, "n_mics", &c.model.n_mics, "model");
  Take(model, "tap_length", &c.model.tap_length, "model");
  Take(model, "stack_length", &c.model.stack_length, "model");
  Take(model, "n_iterations", &c.model.n_iterations, "model");
  Take(model, "pd_floor_rel", &c.model.pd_floor_rel, "model");
  Take(model, "variance_floor_rel", &c.model.variance_floor_rel, "model");
  Take(model, "noise_init_rel", &c.model.noise_init_rel, "model");
  Take(model, "tap_init_decay", &c.model.tap_init_decay, "model");
  RejectLeftovers(model, "model");

  json stft = Section(root, "stft");
  Take(stft, "frame_size", &c.stft.frame_size, "stft");
  Take(stft, "hop", &c.stft.hop, "stft");
  RejectLeftovers(stft, "stft");

  json sc = Section(root, "scenario");
  auto& s = c.scenario;
  Take(sc, "source", &s.source_path, "scenario");
  Take(sc, "noise", &s.noise_path, "scenario");
  name = NoiseColorName(s.noise_color);
  Take(sc, "noise_color", &name, "scenario");
  s.noise_color = ParseNoiseColor(name);
  Take(sc, "rir_dir", &s.rir_dir, "scenario");
  Take(sc, "rt60", &s.rt60, "scenario");
  Take(sc, "snr_db", &s.snr_db, "scenario");
  name = ScenarioName(s.scenario);
  Take(sc, "atf", &name, "scenario");
  s.scenario = ParseScenario(name);
  Take(sc, "seed", &s.seed, "scenario");
  Take(sc, "n_mics", &s.n_mics, "scenario");
  Take(sc, "duration_s", &s.duration_s, "scenario");
  Take(sc, "sample_rate", &s.sample_rate, "scenario");
  Take(sc, "rir_length_s", &s.rir_length_s, "scenario");
  Take(sc, "drr_db", &s.drr_db, "scenario");
  Take(sc, "segment_length", &s.segment_length, "scenario");
  Take(sc, "block_length", &s.block_length, "scenario");
  Take(sc, "per_sample_blending", &s.per_sample_blending, "scenario");
  RejectLeftovers(sc, "scenario");

  json io = Section(root, "io");
  Take(io, "input", &c.io.input, "io");
  Take(io, "output", &c.io.output, "io");
  Take(io, "reference", &c.io.reference, "io");
  Take(io, "checkpoint", &c.io.checkpoint, "io");
  Take(io, "cost_csv", &c.io.cost_csv, "io");
  Take(io, "output_dir", &c.io.output_dir, "io");
  Take(io, "downmix", &c.io.downmix, "io");
  name = FormatName(c.io.format);
  Take(io, "format", &name, "io");
  c.io.format = ParseFormat(name);
  RejectLeftovers(io, "io");

  json bench = Section(root, "bench");
  Take(bench, "seeds", &c.bench.seeds, "bench");
  std::vector<std::string> names;
  if (bench.contains("methods")) {
    Take(bench, "methods", &names, "bench");
    c.bench.methods.clear();
    for (const auto& n : names) c.bench.methods.push_back(ParseMethod(n));
  }
  if (bench.contains("scenarios")) {
    Take(bench, "scenarios", &names, "bench");
    c.bench.scenarios.clear();
    for (const auto& n : names) c.bench.scenarios.push_back(ParseScenario(n));
  }
  RejectLeftovers(bench, "bench");

  RejectLeftovers(root, "");
  return c;
}

// "a.b=v" -> {"a": {"b": v}}
json OverridePatch(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + text + "' is not of the form key=value");
  const std::string path = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json patch = json::object();
  json* node = &patch;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("override '" + text + "' has an empty key");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  return patch;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

std::string StemOf(const std::string& path) {
  const fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::exists(path)) throw MissingFileError(path);
}

int ResolvedThreads(int threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Substream names derived from the scenario seed, as recorded in manifests.
json SubstreamNames(const ScenarioConfig& s) {
  json names = json::array();
  if (s.source_path.empty()) names.push_back("source");
  if (s.rir_dir.empty()) names.push_back("rir/az<deg>/ch<m>");
  if (s.scenario == AtfScenario::kTimeVarying) names.push_back("motion");
  if (s.noise_path.empty()) names.push_back("noise");
  return names;
}

json BaseManifest(const RunConfig& cfg) {
  return {{"tool", "tvcov"},
          {"version", Version()},
          {"command", CommandName(cfg.command)},
          {"config", ToJsonTree(cfg)},
          {"pesq", "n/a"}};
}

void WriteManifest(const std::string& path, const json& manifest) {
  WriteText(path, manifest.dump(2) + "\n");
}

Waveform LoadWaveform(const std::string& path, const char* what) {
  RequireFile(path, what);
  return ReadWav(path);
}

void RunSimulate(const RunConfig& cfg, std::ostream* log) {
  if (cfg.io.output.empty()) throw ConfigError("simulate needs io.output");
  const SimulatedMixture mix = Simulate(cfg.scenario);
  const std::string stem = StemOf(cfg.io.output);
  const fs::path out(cfg.io.output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteWav(cfg.io.output, mix.mixture, cfg.io.format);
  WriteWav(stem + ".reference.wav", mix.reference, cfg.io.format);

  json manifest = BaseManifest(cfg);
  manifest["seed"] = cfg.scenario.seed;
  manifest["substreams"] = SubstreamNames(cfg.scenario);
  manifest["noise_kind"] = mix.noise_kind;
  manifest["rir_kind"] = mix.rir_kind;
  manifest["outputs"] = {{"mixture", cfg.io.output},
                         {"reference", stem + ".reference.wav"}};
  WriteManifest(stem + ".manifest.json", manifest);
  if (log)
    *log << "simulate: wrote " << cfg.io.output << " (" << mix.mixture.num_channels()
         << " ch, " << mix.mixture.num_samples() << " samples)\n";
}

void RunDereverb(const RunConfig& cfg, std::ostream* log) {
  if (cfg.io.output.empty()) throw ConfigError("dereverb needs io.output");
  const Waveform input = LoadWaveform(cfg.io.input, "io.input");
  const ModelConfig model = cfg.EffectiveModel();
  DereverbResult r =
      Dereverberate(input, model, cfg.stft, ResolvedThreads(cfg.threads));
  r.fit.ThrowIfFailed();

  const std::string stem = StemOf(cfg.io.output);
  const fs::path out(cfg.io.output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteWav(cfg.io.output, cfg.io.downmix ? Downmix(r.output) : r.output,
           cfg.io.format);
  const std::string cost_csv =
      cfg.io.cost_csv.empty() ? stem + ".cost.csv" : cfg.io.cost_csv;
  std::ostringstream costs;
  WriteCostCsv(costs, r.fit.trace);
  WriteText(cost_csv, costs.str());
  if (!cfg.io.checkpoint.empty()) SaveModels(cfg.io.checkpoint, r.fit.models);

  json manifest = BaseManifest(cfg);
  manifest["effective_model"] = ToJsonTree(cfg)["model"];
  manifest["effective_model"]["tap_length"] = model.tap_length;
  manifest["effective_model"]["stack_length"] = model.stack_length;
  manifest["effective_model"]["n_mics"] = model.n_mics;
  json outputs = {{"audio", cfg.io.output}, {"cost_csv", cost_csv}};
  if (!cfg.io.checkpoint.empty()) outputs["checkpoint"] = cfg.io.checkpoint;
  manifest["outputs"] = outputs;
  const auto& total = r.fit.trace.total;
  if (!total.empty()) {
    manifest["cost_initial"] = total.front();
    manifest["cost_final"] = total.back();
  }
  WriteManifest(stem + ".manifest.json", manifest);
  if (log)
    *log << "dereverb: " << MethodName(cfg.method) << " wrote " << cfg.io.output
         << "\n";
}

void RunEvaluate(const RunConfig& cfg, std::ostream* log) {
  if (cfg.io.output.empty()) throw ConfigError("evaluate needs io.output");
  const Waveform ref = LoadWaveform(cfg.io.reference, "io.reference");
  const Waveform est = LoadWaveform(cfg.io.input, "io.input");
  MetricsRow row{fs::path(cfg.io.input).stem().string(), "external",
                 MethodName(cfg.method), Evaluate(ref, est)};
  std::ostringstream csv;
  WriteMetricsCsv(csv, {row});
  WriteText(cfg.io.output, csv.str());
  if (log)
    *log << std::fixed << std::setprecision(3) << "evaluate: CD "
         << row.metrics.cd_db << " dB, LLR " << row.metrics.llr << ", FWSegSNR "
         << row.metrics.fwsegsnr_db << " dB\n";
}

void RunBenchCommand(const RunConfig& cfg, std::ostream* log) {
  if (cfg.io.output_dir.empty()) throw ConfigError("bench needs io.output_dir");
  const BenchResult r = RunBench(cfg, log);
  const fs::path dir(cfg.io.output_dir);
  fs::create_directories(dir);
  std::ostringstream rows, summary, table;
  WriteMetricsCsv(rows, r.rows);
  WriteMetricsCsv(summary, r.summary);
  WriteSummaryTable(table, r.summary);
  WriteText((dir / "metrics.csv").string(), rows.str());
  WriteText((dir / "summary.csv").string(), summary.str());
  WriteText((dir / "table.md").string(), table.str());

  json manifest = BaseManifest(cfg);
  json seeds = json::array();
  for (int i = 0; i < cfg.bench.seeds; ++i) seeds.push_back(cfg.scenario.seed + i);
  manifest["seeds"] = seeds;
  manifest["substreams"] = SubstreamNames(cfg.scenario);
  manifest["noise_kind"] = r.noise_kind;
  manifest["rir_kind"] = r.rir_kind;
  manifest["outputs"] = {"metrics.csv", "summary.csv", "table.md"};
  WriteManifest((dir / "manifest.json").string(), manifest);
  if (log) {
    *log << "\n";
    WriteSummaryTable(*log, r.summary);
  }
}

}  // namespace

const char* Version() { return TVCOV_VERSION; }

const char* CommandName(Command c) {
  switch (c) {
    case Command::kSimulate: return "simulate";
    case Command::kDereverb: return "dereverb";
    case Command::kEvaluate: return "evaluate";
    case Command::kBench: return "bench";
  }
  return "unknown";
}

Command ParseCommand(const std::string& name) {
  if (name == "simulate") return Command::kSimulate;
  if (name == "dereverb") return Command::kDereverb;
  if (name == "evaluate") return Command::kEvaluate;
  if (name == "bench") return Command::kBench;
  throw ConfigError("unknown command '" + name + "'");
}

void RunConfig::Validate() const {
  try {
    const ModelConfig m = EffectiveModel();
    m.Validate();
    CheckMethodConfig(method, m);
    scenario.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (stft.frame_size < 2 || stft.frame_size % 2 != 0)
    throw ConfigError("stft.frame_size must be even and at least 2");
  if (stft.hop < 1 || stft.hop > stft.frame_size || stft.frame_size % stft.hop != 0)
    throw ConfigError("stft.hop must divide stft.frame_size");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (bench.seeds < 1) throw ConfigError("bench.seeds must be >= 1");
  if (bench.methods.empty()) throw ConfigError("bench.methods is empty");
  if (bench.scenarios.empty()) throw ConfigError("bench.scenarios is empty");
}

ModelConfig RunConfig::EffectiveModel() const {
  return ConfigureMethod(method, model);
}

std::string ConfigToJson(const RunConfig& cfg) {
  return ToJsonTree(cfg).dump(2) + "\n";
}

RunConfig ConfigFromJson(const std::string& text, const RunConfig& base) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  return FromJsonTree(std::move(root), base);
}

RunConfig ResolveConfig(const std::string& path,
                        const std::vector<std::string>& overrides) {
  json merged = ToJsonTree(RunConfig{});
  if (!path.empty()) {
    json file = json::parse(ReadText(path), nullptr, false);
    if (file.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
    if (!file.is_object()) throw ConfigError("config file must hold an object: " + path);
    merged.merge_patch(file);
  }
  for (const auto& o : overrides) merged.merge_patch(OverridePatch(o));
  RunConfig cfg = FromJsonTree(std::move(merged), RunConfig{});
  cfg.Validate();
  return cfg;
}

BenchResult RunBench(const RunConfig& cfg, std::ostream* log) {
  cfg.Validate();
  BenchResult result;
  const int threads = ResolvedThreads(cfg.threads);
  for (AtfScenario scenario : cfg.bench.scenarios) {
    for (int i = 0; i < cfg.bench.seeds; ++i) {
      ScenarioConfig sc = cfg.scenario;
      sc.scenario = scenario;
      sc.seed = cfg.scenario.seed + uint64_t(i);
      const SimulatedMixture mix = Simulate(sc);
      result.noise_kind = mix.noise_kind;
      result.rir_kind = mix.rir_kind;
      const std::string utt = "seed" + std::to_string(sc.seed);
      const std::string sname = ScenarioName(scenario);
      result.rows.push_back({utt, sname, "unprocessed", Evaluate(mix.reference, mix.mixture)});
      if (log) *log << sname << " " << utt << " unprocessed done\n";
      for (Method method : cfg.bench.methods) {
        RunConfig mc = cfg;
        mc.method = method;
        DereverbResult r =
            Dereverberate(mix.mixture, mc.EffectiveModel(), cfg.stft, threads);
        r.fit.ThrowIfFailed();
        result.rows.push_back(
            {utt, sname, MethodName(method), Evaluate(mix.reference, r.output)});
        if (log) *log << sname << " " << utt << " " << MethodName(method) << " done\n";
      }
    }
  }
  result.summary = SummarizeMetrics(result.rows);
  return result;
}

void WriteSummaryTable(std::ostream& os, const std::vector<MetricsRow>& summary) {
  std::string current;
  std::ios_base::fmtflags flags = os.flags();
  os << std::fixed << std::setprecision(2);
  for (const auto& row : summary) {
    if (row.scenario != current) {
      if (!current.empty()) os << "\n";
      current = row.scenario;
      os << "### " << current << "\n\n"
         << "| Method | PESQ | CD [dB] | LLR | FWSegSNR [dB] |\n"
         << "|---|---|---|---|---|\n";
    }
    os << "| " << row.method << " | n/a | " << row.metrics.cd_db << " | "
       << row.metrics.llr << " | " << row.metrics.fwsegsnr_db << " |\n";
  }
  os.flags(flags);
}

void Run(const RunConfig& cfg, std::ostream* log) {
  cfg.Validate();
  switch (cfg.command) {
    case Command::kSimulate: RunSimulate(cfg, log); break;
    case Command::kDereverb: RunDereverb(cfg, log); break;
    case Command::kEvaluate: RunEvaluate(cfg, log); break;
    case Command::kBench: RunBenchCommand(cfg, log); break;
  }
}

int ExitCode(const std::exception& e) {
  if (dynamic_cast<const MissingFileError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

}  // namespace tvcov
