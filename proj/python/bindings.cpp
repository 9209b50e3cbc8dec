// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Python bindings. Waveforms are float64 arrays shaped (channels, samples);
// spectrograms are complex128 arrays shaped (frames, bins, channels).

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "tvcov/error.hpp"
#include "tvcov/hermitian.hpp"
#include "tvcov/metrics.hpp"
#include "tvcov/pipeline.hpp"
#include "tvcov/run.hpp"
#include "tvcov/simulate.hpp"
#include "tvcov/stft.hpp"

namespace py = pybind11;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

tvcov::Waveform ToWaveform(const RealArray& a, double sample_rate) {
  if (a.ndim() != 1 && a.ndim() != 2)
    throw tvcov::InvalidArgument("waveform must be 1-D or (channels, samples)");
  const std::size_t channels = a.ndim() == 1 ? 1 : a.shape(0);
  const std::size_t samples = a.ndim() == 1 ? a.shape(0) : a.shape(1);
  tvcov::Waveform w = tvcov::Waveform::Zeros(channels, samples, sample_rate);
  const double* p = a.data();
  for (std::size_t c = 0; c < channels; ++c)
    std::memcpy(w.channels[c].data(), p + c * samples, samples * sizeof(double));
  return w;
}

RealArray FromWaveform(const tvcov::Waveform& w) {
  RealArray out({w.num_channels(), w.num_samples()});
  double* p = out.mutable_data();
  for (std::size_t c = 0; c < w.num_channels(); ++c)
    std::memcpy(p + c * w.num_samples(), w.channels[c].data(),
                w.num_samples() * sizeof(double));
  return out;
}

ComplexArray FromTensor(const tvcov::SpectrogramTensor& s) {
  ComplexArray out({s.num_frames(), s.num_bins(), s.num_channels()});
  auto v = out.mutable_unchecked<3>();
  for (int l = 0; l < s.num_frames(); ++l)
    for (int k = 0; k < s.num_bins(); ++k)
      for (int m = 0; m < s.num_channels(); ++m) v(l, k, m) = s.at(l, k, m);
  return out;
}

tvcov::SpectrogramTensor ToTensor(const ComplexArray& a, int frame_size, int hop,
                                  std::size_t length) {
  if (a.ndim() != 3) throw tvcov::InvalidArgument("spectrogram must be (frames, bins, channels)");
  tvcov::SpectrogramTensor s(int(a.shape(0)), int(a.shape(2)), frame_size, hop, length);
  if (s.num_bins() != a.shape(1))
    throw tvcov::InvalidArgument("bin count does not match frame_size");
  auto v = a.unchecked<3>();
  for (int l = 0; l < s.num_frames(); ++l)
    for (int k = 0; k < s.num_bins(); ++k)
      for (int m = 0; m < s.num_channels(); ++m) s.at(l, k, m) = v(l, k, m);
  return s;
}

py::dict MetricsDict(const tvcov::Metrics& m) {
  py::dict d;
  d["cd_db"] = m.cd_db;
  d["llr"] = m.llr;
  d["fwsegsnr_db"] = m.fwsegsnr_db;
  d["lag"] = m.lag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tvcov, m) {
  m.doc() = "Multichannel dereverberation with a time-varying covariance model";

  py::register_exception<tvcov::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<tvcov::MissingFileError>(m, "MissingFileError", PyExc_FileNotFoundError);
  py::register_exception<tvcov::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<tvcov::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("version", &tvcov::Version);

  m.def(
      "analyze",
      [](const RealArray& x, int frame_size, int hop) {
        return FromTensor(tvcov::Analyze(ToWaveform(x, 16000.0), frame_size, hop));
      },
      py::arg("x"), py::arg("frame_size") = 1024, py::arg("hop") = 512);

  m.def(
      "synthesize",
      [](const ComplexArray& s, std::size_t length, int frame_size, int hop) {
        return FromWaveform(tvcov::Synthesize(ToTensor(s, frame_size, hop, length), 16000.0));
      },
      py::arg("spectrogram"), py::arg("length"), py::arg("frame_size") = 1024,
      py::arg("hop") = 512);

  m.def("geometric_mean", &tvcov::GeometricMean, py::arg("a"), py::arg("b"));

  m.def(
      "_simulate",
      [](const std::string& config_json) {
        const tvcov::RunConfig cfg = tvcov::ConfigFromJson(config_json);
        cfg.scenario.Validate();
        const tvcov::SimulatedMixture mix = tvcov::Simulate(cfg.scenario);
        py::dict d;
        d["mixture"] = FromWaveform(mix.mixture);
        d["reverberant"] = FromWaveform(mix.reverberant);
        d["reference"] = FromWaveform(mix.reference);
        d["sample_rate"] = mix.mixture.sample_rate;
        d["noise_kind"] = mix.noise_kind;
        d["rir_kind"] = mix.rir_kind;
        return d;
      },
      py::arg("config_json"));

  m.def(
      "_dereverberate",
      [](const RealArray& x, double sample_rate, const std::string& config_json) {
        const tvcov::RunConfig cfg = tvcov::ConfigFromJson(config_json);
        cfg.Validate();
        const tvcov::Waveform w = ToWaveform(x, sample_rate);
        tvcov::DereverbResult r;
        {
          py::gil_scoped_release release;
          r = tvcov::Dereverberate(w, cfg.EffectiveModel(), cfg.stft,
                                   cfg.threads > 0 ? cfg.threads : 1);
        }
        r.fit.ThrowIfFailed();
        py::dict d;
        d["output"] = FromWaveform(r.output);
        d["cost"] = r.fit.trace.total;
        return d;
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("config_json"));

  m.def(
      "evaluate",
      [](const RealArray& ref, const RealArray& est, double sample_rate) {
        return MetricsDict(
            tvcov::Evaluate(ToWaveform(ref, sample_rate), ToWaveform(est, sample_rate)));
      },
      py::arg("reference"), py::arg("estimate"), py::arg("sample_rate") = 16000.0);
}
