// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/optimizer.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>

#include "parallel.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

// Re w^H a w for Hermitian a, without a temporary.
template <typename M, typename V>
double QuadraticForm(const M& a, const V& w) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    std::complex<double> col = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      col += std::conj(w(i)) * a(i, j);
    acc += col * w(j);
  }
  return acc.real();
}

FrequencyModel SourceVarianceStep(const FrequencyModel& m,
                                  const FrameInverses& inv) {
  FrequencyModel out = m;
  const int frames = m.num_frames();
  for (int l = 0; l < frames; ++l) {
    double num = 0.0;
    double den = 0.0;
    for (int d = 0; d < m.tap_length() && l + d < frames; ++d) {
      const int b = m.tap_block(d);
      const auto tap = m.tap_block_view(d);
      for (int j = 0; j < inv.rank; ++j)
        num += QuadraticForm(tap, inv.whitened.col((l + d) * inv.rank + j).head(b));
      den += TraceOfProduct(inv.inverse[l + d].topLeftCorner(b, b), tap);
    }
    if (!(den > 0.0) || !std::isfinite(num))
      throw NumericalError("degenerate model: source variance update has a "
                           "vanishing denominator", -1, l);
    const double v = m.source_variance[l] * std::sqrt(std::max(num, 0.0) / den);
    out.source_variance[l] = std::max(v, m.variance_floor);
  }
  return out;
}

FrequencyModel TapStep(const FrequencyModel& m, const FrameInverses& inv,
                       double pd_floor_rel, std::vector<int>* skipped) {
  FrequencyModel out = m;
  const int frames = m.num_frames();
  for (int d = 0; d < m.tap_length(); ++d) {
    const int b = m.tap_block(d);
    const int count = frames - d;
    if (count <= 0) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    CMatrix g = CMatrix::Zero(b, b);
    const int rank = inv.rank;
    CMatrix scaled(b, count * rank);
    for (int l = d; l < frames; ++l) {
      const double v = m.source_variance[l - d];
      g += v * inv.inverse[l].topLeftCorner(b, b);
      scaled.middleCols((l - d) * rank, rank) =
          std::sqrt(v) * inv.whitened.middleCols(l * rank, rank).topRows(b);
    }
    g = Hermitize(g);
    Eigen::LLT<CMatrix> llt(g);
    if (llt.info() != Eigen::Success) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    const CMatrix j = scaled * scaled.adjoint();
    const CMatrix tap = m.tap_block_view(d);
    const CMatrix target = Hermitize(tap * j * tap);
    out.tap_block_view(d) =
        PsdFloor(internal::InverseGeometricMean(g, target), pd_floor_rel);
  }
  return out;
}

FrequencyModel NoiseStep(const FrequencyModel& m, const FrameInverses& inv,
                         double pd_floor_rel) {
  FrequencyModel out = m;
  const int dim = m.dim();
  CMatrix f = CMatrix::Zero(dim, dim);
  for (const auto& r : inv.inverse) f += r;
  const CMatrix e = inv.whitened * inv.whitened.adjoint();
  const CMatrix& rv = m.noise_covariance;
  const CMatrix target = Hermitize(rv * e * rv);
  out.noise_covariance =
      PsdFloor(internal::InverseGeometricMean(Hermitize(f), target), pd_floor_rel);
  return out;
}

}  // namespace

FrequencyModel UpdateSourceVariance(const FrequencyModel& m,
                                    const StackedObservations& obs) {
  ValidateModel(m);
  return SourceVarianceStep(m, ComputeFrameInverses(m, obs));
}

FrequencyModel UpdateTapCovariances(const FrequencyModel& m,
                                    const StackedObservations& obs,
                                    double pd_floor_rel,
                                    std::vector<int>* skipped) {
  ValidateModel(m);
  return TapStep(m, ComputeFrameInverses(m, obs), pd_floor_rel, skipped);
}

FrequencyModel UpdateNoiseCovariance(const FrequencyModel& m,
                                     const StackedObservations& obs,
                                     double pd_floor_rel) {
  ValidateModel(m);
  return NoiseStep(m, ComputeFrameInverses(m, obs), pd_floor_rel);
}

FrequencyModel UpdateSourceVariance(const FrequencyModel& m,
                                    const FactoredCovariances& stats) {
  ValidateModel(m);
  FrameInverses inv;
  ComputeFrameInverses(m, stats, &inv);
  return SourceVarianceStep(m, inv);
}

FrequencyModel UpdateTapCovariances(const FrequencyModel& m,
                                    const FactoredCovariances& stats,
                                    double pd_floor_rel,
                                    std::vector<int>* skipped) {
  ValidateModel(m);
  FrameInverses inv;
  ComputeFrameInverses(m, stats, &inv);
  return TapStep(m, inv, pd_floor_rel, skipped);
}

FrequencyModel UpdateNoiseCovariance(const FrequencyModel& m,
                                     const FactoredCovariances& stats,
                                     double pd_floor_rel) {
  ValidateModel(m);
  FrameInverses inv;
  ComputeFrameInverses(m, stats, &inv);
  return NoiseStep(m, inv, pd_floor_rel);
}

const char* StageName(UpdateStage stage) {
  switch (stage) {
    case UpdateStage::kInit: return "init";
    case UpdateStage::kSourceVariance: return "source_variance";
    case UpdateStage::kTapCovariances: return "tap_covariances";
    case UpdateStage::kNoiseCovariance: return "noise_covariance";
    case UpdateStage::kRenormalize: return "renormalize";
  }
  return "unknown";
}

FrequencyFit FitFrequency(const StackedObservations& obs,
                          const ModelConfig& cfg,
                          const StageObserver& observer) {
  FrequencyFit fit{InitParameters(obs, cfg), {}, {}};
  auto notify = [&](int it, UpdateStage stage) {
    if (observer) observer(it, stage, fit.model);
  };
  // The inverses computed for the cost are reused by the next v update.
  FrameInverses inv = ComputeFrameInverses(fit.model, obs);
  fit.costs.push_back(NegativeLogLikelihood(inv));
  notify(0, UpdateStage::kInit);

  for (int it = 1; it <= cfg.n_iterations; ++it) {
    fit.model = SourceVarianceStep(fit.model, inv);
    notify(it, UpdateStage::kSourceVariance);

    ComputeFrameInverses(fit.model, obs, &inv);
    fit.model = TapStep(fit.model, inv, cfg.pd_floor_rel, &fit.skipped_taps);
    notify(it, UpdateStage::kTapCovariances);

    ComputeFrameInverses(fit.model, obs, &inv);
    fit.model = NoiseStep(fit.model, inv, cfg.pd_floor_rel);
    notify(it, UpdateStage::kNoiseCovariance);

    RenormalizeScale(fit.model);
    notify(it, UpdateStage::kRenormalize);

    ComputeFrameInverses(fit.model, obs, &inv);
    const double cost = NegativeLogLikelihood(inv);
    if (!std::isfinite(cost)) throw NumericalError("non-finite cost");
    fit.costs.push_back(cost);
  }
  return fit;
}

void FitResult::ThrowIfFailed() const {
  if (failures.empty()) return;
  const auto& f = failures.front();
  throw NumericalError(f.message, f.frequency, f.frame);
}

FitResult Iterate(const SpectrogramTensor& s, const ModelConfig& cfg,
                  const FitOptions& options) {
  cfg.Validate();
  if (s.num_channels() != cfg.n_mics)
    throw InvalidArgument("spectrogram has " + std::to_string(s.num_channels()) +
                          " channels but the model expects " +
                          std::to_string(cfg.n_mics));
  const int bins = s.num_bins();
  FitResult result;
  result.models.resize(bins);
  result.trace.per_frequency.resize(bins);
  std::vector<std::optional<FrequencyFailure>> failures(bins);

  internal::ParallelFor(bins, options.threads, [&](int k) {
    const StackedObservations obs = StackFrequency(s, k, cfg.stack_length);
    try {
      FrequencyFit fit = FitFrequency(obs, cfg);
      result.models[k] = std::move(fit.model);
      result.trace.per_frequency[k] = std::move(fit.costs);
    } catch (const NumericalError& e) {
      failures[k] = FrequencyFailure{k, e.frame(), e.detail()};
      result.models[k] = InitParameters(obs, cfg);
    }
  });

  result.trace.total.assign(cfg.n_iterations + 1, 0.0);
  for (int k = 0; k < bins; ++k) {
    if (failures[k]) {
      result.failures.push_back(*failures[k]);
      continue;
    }
    for (int i = 0; i <= cfg.n_iterations; ++i)
      result.trace.total[i] += result.trace.per_frequency[k][i];
  }
  return result;
}

void WriteCostCsv(std::ostream& os, const CostTrace& trace) {
  const auto old_precision = os.precision(17);
  os << "iteration,frequency,cost,total\n";
  for (int i = 1; i <= trace.num_iterations(); ++i)
    for (std::size_t k = 0; k < trace.per_frequency.size(); ++k) {
      const auto& costs = trace.per_frequency[k];
      if (int(costs.size()) <= i) continue;
      os << i << ',' << k << ',' << costs[i] << ',' << trace.total[i] << '\n';
    }
  os.precision(old_precision);
}

}  // namespace tvcov
