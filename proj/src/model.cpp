// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "cholesky.hpp"
#include "tvcov/error.hpp"

namespace tvcov {
namespace {

// Power reference used when the input is digital silence.
constexpr double kMinPowerReference = 1e-20;
constexpr double kMaxCondition = 1e12;

}  // namespace

void ModelConfig::Validate() const {
  if (n_mics < 1) throw InvalidArgument("n_mics must be >= 1");
  if (tap_length < 1) throw InvalidArgument("tap_length must be >= 1");
  if (stack_length < 1) throw InvalidArgument("stack_length must be >= 1");
  if (stack_length > 1 && tap_length > stack_length)
    throw InvalidArgument(
        "tap_length must not exceed stack_length when frames are stacked");
  if (n_iterations < 0) throw InvalidArgument("n_iterations must be >= 0");
  if (!(pd_floor_rel >= 0.0) || !(variance_floor_rel >= 0.0))
    throw InvalidArgument("floors must be non-negative");
  if (!(noise_init_rel > 0.0)) throw InvalidArgument("noise_init_rel must be > 0");
}

ExtendedObservation StackObservation(const SpectrogramTensor& s, int l, int k,
                                     int stack_length) {
  if (l < 0 || l >= s.num_frames())
    throw InvalidArgument("frame index " + std::to_string(l) + " out of range");
  if (k < 0 || k >= s.num_bins())
    throw InvalidArgument("frequency index out of range");
  if (stack_length < 1) throw InvalidArgument("stack_length must be >= 1");
  const int nm = s.num_channels();
  ExtendedObservation x{CVector::Zero(nm * stack_length), l, k};
  for (int b = 0; b < stack_length && l - b >= 0; ++b) {
    const auto f = s.frame(l - b, k);
    for (int m = 0; m < nm; ++m) x.vector(b * nm + m) = f[m];
  }
  return x;
}

StackedObservations StackFrequency(const SpectrogramTensor& s, int k,
                                   int stack_length) {
  if (k < 0 || k >= s.num_bins())
    throw InvalidArgument("frequency index out of range");
  const int nm = s.num_channels();
  StackedObservations obs =
      CMatrix::Zero(nm * stack_length, s.num_frames());
  for (int l = 0; l < s.num_frames(); ++l)
    for (int b = 0; b < stack_length && l - b >= 0; ++b) {
      const auto f = s.frame(l - b, k);
      for (int m = 0; m < nm; ++m) obs(b * nm + m, l) = f[m];
    }
  return obs;
}

CMatrix AssembleMixtureCovariance(const FrequencyModel& m, int l) {
  CMatrix r = m.noise_covariance;
  for (int d = 0; d < m.tap_length() && l - d >= 0; ++d) {
    const double v = m.source_variance[l - d];
    if (v == 0.0) continue;
    const int b = m.tap_block(d);
    r.topLeftCorner(b, b) += v * m.tap_block_view(d);
  }
  return r;
}

FrameInverses ComputeFrameInverses(const FrequencyModel& m,
                                   const StackedObservations& obs) {
  FrameInverses out;
  ComputeFrameInverses(m, obs, &out);
  return out;
}

namespace {

void FrameInversesImpl(const FrequencyModel& m, const CMatrix& factors,
                       int rank, FrameInverses& out) {
  if (rank < 1 || factors.cols() % rank != 0)
    throw InvalidArgument("factor columns are not a multiple of the rank");
  const int frames = int(factors.cols()) / rank;
  const int dim = int(factors.rows());
  if (frames != m.num_frames() || dim != m.dim())
    throw InvalidArgument("observations do not match the model geometry");

  out.rank = rank;
  out.floored_frames = 0;
  out.inverse.resize(frames);
  out.whitened.resize(dim, factors.cols());
  out.quadratic.resize(frames);
  out.log_det.resize(frames);
  internal::SmallCholesky chol;
  CMatrix r;
  CVector y, w;

  for (int l = 0; l < frames; ++l) {
    r = AssembleMixtureCovariance(m, l);
    if (!r.allFinite())
      throw NumericalError("non-finite mixture covariance", -1, l);
    bool ok = chol.Compute(r);
    if (ok) {
      const double ratio = chol.PivotRatio();
      ok = ratio * ratio <= kMaxCondition;
    }
    if (!ok) {
      // Floor relative to the mean eigenvalue so the condition number is
      // bounded by roughly dim / 1e-12.
      r = PsdFloor(r, 1.0 / kMaxCondition);
      ++out.floored_frames;
      if (!chol.Compute(r))
        throw NumericalError("mixture covariance is not positive definite", -1,
                             l);
    }
    chol.Inverse(&out.inverse[l]);
    double quadratic = 0.0;
    for (int j = 0; j < rank; ++j) {
      const int c = l * rank + j;
      chol.ForwardSolve(factors.col(c), &y);
      chol.BackwardSolve(y, &w);
      out.whitened.col(c) = w;
      quadratic += y.squaredNorm();
    }
    out.quadratic[l] = quadratic;
    out.log_det[l] = chol.LogDet();
    if (!std::isfinite(out.quadratic[l]) || !std::isfinite(out.log_det[l]))
      throw NumericalError("non-finite likelihood term", -1, l);
  }
}

}  // namespace

void ComputeFrameInverses(const FrequencyModel& m,
                          const StackedObservations& obs, FrameInverses* out) {
  FrameInversesImpl(m, obs, 1, *out);
}

void ComputeFrameInverses(const FrequencyModel& m,
                          const FactoredCovariances& stats, FrameInverses* out) {
  FrameInversesImpl(m, stats.factors, stats.rank, *out);
}

FactoredCovariances FactorCovariances(const std::vector<CMatrix>& rhat) {
  FactoredCovariances out;
  if (rhat.empty()) return out;
  const int dim = int(rhat.front().rows());
  out.rank = dim;
  out.factors = CMatrix::Zero(dim, CMatrix::Index(rhat.size()) * dim);
  for (std::size_t l = 0; l < rhat.size(); ++l) {
    if (rhat[l].rows() != dim || rhat[l].cols() != dim)
      throw InvalidArgument("empirical covariances differ in dimension");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Hermitize(rhat[l]));
    if (es.info() != Eigen::Success)
      throw NumericalError("eigendecomposition failed", -1, int(l));
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    out.factors.middleCols(CMatrix::Index(l) * dim, dim) =
        es.eigenvectors() * root.asDiagonal();
  }
  return out;
}

double NegativeLogLikelihood(const FrameInverses& inv) {
  double cost = 0.0;
  for (std::size_t l = 0; l < inv.quadratic.size(); ++l)
    cost += inv.quadratic[l] + inv.log_det[l];
  return cost;
}

double NegativeLogLikelihood(const FrequencyModel& m,
                             const StackedObservations& obs) {
  const double cost = NegativeLogLikelihood(ComputeFrameInverses(m, obs));
  if (!std::isfinite(cost)) throw NumericalError("non-finite cost");
  return cost;
}

double NegativeLogLikelihood(const FrequencyModel& m,
                             const FactoredCovariances& stats) {
  FrameInverses inv;
  ComputeFrameInverses(m, stats, &inv);
  const double cost = NegativeLogLikelihood(inv);
  if (!std::isfinite(cost)) throw NumericalError("non-finite cost");
  return cost;
}

FrequencyModel InitParameters(const StackedObservations& obs,
                              const ModelConfig& cfg) {
  cfg.Validate();
  if (obs.cols() < 1) throw InvalidArgument("no frames to initialize from");
  if (obs.rows() != cfg.dim())
    throw InvalidArgument("observation dimension does not match the config");

  const int nm = cfg.n_mics;
  const int frames = int(obs.cols());
  FrequencyModel m;
  m.n_mics = nm;
  m.stack_length = cfg.stack_length;
  m.source_variance.resize(frames);

  double mean_power = 0.0;
  for (int l = 0; l < frames; ++l) {
    const double p = obs.col(l).head(nm).squaredNorm() / nm;
    m.source_variance[l] = p;
    mean_power += p;
  }
  mean_power /= frames;
  const double reference = std::max(mean_power, kMinPowerReference);
  m.variance_floor = cfg.variance_floor_rel * reference;
  for (auto& v : m.source_variance) v = std::max(v, m.variance_floor);

  const int dim = cfg.dim();
  double gain = 1.0;
  for (int d = 0; d < cfg.tap_length; ++d) {
    CMatrix tap = CMatrix::Zero(dim, dim);
    const int b = cfg.tap_block(d);
    tap.topLeftCorner(b, b).setIdentity();
    tap.topLeftCorner(b, b) *= gain;
    m.tap_covariances.push_back(std::move(tap));
    gain *= cfg.tap_init_decay;
  }
  m.noise_covariance =
      cfg.noise_init_rel * reference * CMatrix::Identity(dim, dim);
  return m;
}

FrequencyModel InitParameters(const SpectrogramTensor& s,
                              const ModelConfig& cfg, int k) {
  if (s.num_channels() != cfg.n_mics)
    throw InvalidArgument("spectrogram channel count does not match n_mics");
  return InitParameters(StackFrequency(s, k, cfg.stack_length), cfg);
}

void RenormalizeScale(FrequencyModel& m) {
  if (m.tap_covariances.empty()) return;
  const double c = m.tap_block_view(0).trace().real() / m.n_mics;
  if (!(c > 0.0) || !std::isfinite(c)) return;
  for (auto& tap : m.tap_covariances) tap /= c;
  for (auto& v : m.source_variance) v *= c;
  m.variance_floor *= c;
}

bool HasTapZeroPattern(const FrequencyModel& m) {
  const int dim = m.dim();
  for (int d = 0; d < m.tap_length(); ++d) {
    const auto& t = m.tap_covariances[d];
    const int b = m.tap_block(d);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i)
        if ((i >= b || j >= b) && t(i, j) != Complex(0.0, 0.0)) return false;
  }
  return true;
}

void ValidateModel(const FrequencyModel& m) {
  const int dim = m.dim();
  if (dim < 1 || m.source_variance.empty() || m.tap_covariances.empty())
    throw InvalidArgument("empty frequency model");
  if (m.noise_covariance.rows() != dim || m.noise_covariance.cols() != dim)
    throw InvalidArgument("noise covariance has the wrong size");
  for (int d = 0; d < m.tap_length(); ++d) {
    const auto& t = m.tap_covariances[d];
    if (t.rows() != dim || t.cols() != dim)
      throw InvalidArgument("tap covariance has the wrong size");
    if (m.tap_block(d) > dim)
      throw InvalidArgument("tap block exceeds the stacked dimension");
  }
  if (!HasTapZeroPattern(m))
    throw InvalidArgument("tap covariance violates the causal zero pattern");
}

}  // namespace tvcov
