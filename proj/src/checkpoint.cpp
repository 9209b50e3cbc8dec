// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

using nlohmann::json;

json PackBlock(const CMatrix& a, int block) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < block; ++i)
    for (int j = i; j < block; ++j) {
      re.push_back(a(i, j).real());
      im.push_back(a(i, j).imag());
    }
  return {{"block", block}, {"re", re}, {"im", im}};
}

void UnpackBlock(const json& j, CMatrix& a) {
  const int block = j.at("block").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const std::size_t expected = std::size_t(block) * (block + 1) / 2;
  if (block > a.rows() || re.size() != expected || im.size() != expected)
    throw InvalidArgument("checkpoint: malformed Hermitian block");
  std::size_t n = 0;
  for (int i = 0; i < block; ++i)
    for (int j2 = i; j2 < block; ++j2, ++n) {
      const Complex z(re[n].get<double>(), im[n].get<double>());
      a(i, j2) = z;
      a(j2, i) = std::conj(z);
    }
  for (int i = 0; i < block; ++i) a(i, i) = a(i, i).real();
}

}  // namespace

std::string SerializeModels(const std::vector<FrequencyModel>& models) {
  json doc;
  doc["format"] = "tvcov-model";
  doc["version"] = kCheckpointVersion;
  if (!models.empty()) {
    doc["n_mics"] = models.front().n_mics;
    doc["stack_length"] = models.front().stack_length;
    doc["tap_length"] = models.front().tap_length();
  }
  json bins = json::array();
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    json taps = json::array();
    for (int d = 0; d < m.tap_length(); ++d)
      taps.push_back(PackBlock(m.tap_covariances[d], m.tap_block(d)));
    bins.push_back({{"bin", k},
                    {"variance_floor", m.variance_floor},
                    {"source_variance", m.source_variance},
                    {"taps", taps},
                    {"noise", PackBlock(m.noise_covariance, m.dim())}});
  }
  doc["frequencies"] = bins;
  return doc.dump();
}

std::vector<FrequencyModel> DeserializeModels(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format") != "tvcov-model")
      throw InvalidArgument("checkpoint: unknown format");
    if (doc.at("version").get<int>() != kCheckpointVersion)
      throw InvalidArgument("checkpoint: unsupported version");
    std::vector<FrequencyModel> models;
    if (doc.at("frequencies").empty()) return models;
    const int nm = doc.at("n_mics").get<int>();
    const int lx = doc.at("stack_length").get<int>();
    const int ld = doc.at("tap_length").get<int>();
    for (const auto& b : doc.at("frequencies")) {
      FrequencyModel m;
      m.n_mics = nm;
      m.stack_length = lx;
      m.variance_floor = b.at("variance_floor").get<double>();
      m.source_variance = b.at("source_variance").get<std::vector<double>>();
      const int dim = m.dim();
      if (int(b.at("taps").size()) != ld)
        throw InvalidArgument("checkpoint: tap count mismatch");
      for (int d = 0; d < ld; ++d) {
        CMatrix tap = CMatrix::Zero(dim, dim);
        if (b.at("taps")[d].at("block").get<int>() != m.tap_block(d))
          throw InvalidArgument("checkpoint: tap block size mismatch");
        UnpackBlock(b.at("taps")[d], tap);
        m.tap_covariances.push_back(std::move(tap));
      }
      m.noise_covariance = CMatrix::Zero(dim, dim);
      UnpackBlock(b.at("noise"), m.noise_covariance);
      ValidateModel(m);
      models.push_back(std::move(m));
    }
    return models;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("checkpoint: ") + e.what());
  }
}

void SaveModels(const std::string& path,
                const std::vector<FrequencyModel>& models) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << SerializeModels(models) << '\n';
}

std::vector<FrequencyModel> LoadModels(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFileError(path);
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return DeserializeModels(ss.str());
}

}  // namespace tvcov
