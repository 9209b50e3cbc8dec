// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_MODEL_HPP_
#define TVCOV_MODEL_HPP_

#include <vector>

#include "tvcov/hermitian.hpp"
#include "tvcov/stft.hpp"

namespace tvcov {

// Dimensions and numerical settings of the covariance model.
//
// stack_length == 1 selects the model of the current observation only; a
// larger value stacks that many frames into the extended observation.
struct ModelConfig {
  int n_mics = 2;
  int tap_length = 6;
  int stack_length = 6;
  int n_iterations = 20;
  double pd_floor_rel = kDefaultPdFloor;
  double variance_floor_rel = 1e-10;
  // Initial noise covariance is this fraction of the mean input power.
  double noise_init_rel = 1e-2;
  // Ratio between consecutive initial tap gains.
  double tap_init_decay = 0.1;

  int dim() const { return n_mics * stack_length; }
  // Side of the leading nonzero block of tap d.
  int tap_block(int d) const {
    return stack_length == 1 ? n_mics : n_mics * (d + 1);
  }
  // Throws InvalidArgument.
  void Validate() const;
};

// Parameters of one frequency bin.
//
// tap_covariances[d] is stored at full size dim x dim; everything outside
// its leading tap_block(d) square is an exact zero.
struct FrequencyModel {
  int n_mics = 0;
  int stack_length = 0;
  std::vector<double> source_variance;
  std::vector<CMatrix> tap_covariances;
  CMatrix noise_covariance;
  // Lower bound for source_variance; rescaled together with v.
  double variance_floor = 0.0;

  int dim() const { return n_mics * stack_length; }
  int num_frames() const { return int(source_variance.size()); }
  int tap_length() const { return int(tap_covariances.size()); }
  int tap_block(int d) const {
    return stack_length == 1 ? n_mics : n_mics * (d + 1);
  }

  auto tap_block_view(int d) {
    return tap_covariances[d].topLeftCorner(tap_block(d), tap_block(d));
  }
  auto tap_block_view(int d) const {
    return tap_covariances[d].topLeftCorner(tap_block(d), tap_block(d));
  }
};

struct ExtendedObservation {
  CVector vector;
  int frame = 0;
  int frequency = 0;
};

// Observations of one frequency: column l is the stacked vector of frame l.
using StackedObservations = CMatrix;

// [x_l; x_{l-1}; ...; x_{l-L_x+1}] with zeros before the first frame.
// Frames are 0-based here.
ExtendedObservation StackObservation(const SpectrogramTensor& s, int l, int k,
                                     int stack_length);

StackedObservations StackFrequency(const SpectrogramTensor& s, int k,
                                   int stack_length);

// sum_d v[l-d] R_d + R_v, with v of frames before the first treated as zero.
CMatrix AssembleMixtureCovariance(const FrequencyModel& m, int l);

// Empirical covariances in factored form, Rhat_l = Y_l Y_l^H, where Y_l is
// column block l (rank columns wide) of `factors`. StackedObservations are
// the rank-one case Y_l = x_l.
struct FactoredCovariances {
  CMatrix factors;
  int rank = 1;

  int num_frames() const { return rank > 0 ? int(factors.cols()) / rank : 0; }
};

// Square-root factors of the given Hermitian PSD matrices (rank = dim).
FactoredCovariances FactorCovariances(const std::vector<CMatrix>& rhat);

// Per-frame quantities shared by the cost and the updates.
struct FrameInverses {
  std::vector<CMatrix> inverse;  // R_l^-1
  CMatrix whitened;              // column block l: R_l^-1 Y_l
  int rank = 1;                  // columns per frame in `whitened`
  std::vector<double> quadratic; // tr(R_l^-1 Rhat_l)
  std::vector<double> log_det;   // log det R_l
  int floored_frames = 0;
};

// Inverts every assembled covariance. A covariance whose condition number
// exceeds 1e12 is eigenvalue floored before inversion. Throws NumericalError
// carrying the frame index on non-finite input.
FrameInverses ComputeFrameInverses(const FrequencyModel& m,
                                   const StackedObservations& obs);
// Same, reusing the storage of *out.
void ComputeFrameInverses(const FrequencyModel& m,
                          const StackedObservations& obs, FrameInverses* out);
void ComputeFrameInverses(const FrequencyModel& m,
                          const FactoredCovariances& stats, FrameInverses* out);

// sum_l x_l^H R_l^-1 x_l + log det R_l (constant dropped).
double NegativeLogLikelihood(const FrequencyModel& m,
                             const StackedObservations& obs);
double NegativeLogLikelihood(const FrameInverses& inv);
// sum_l tr(R_l^-1 Rhat_l) + log det R_l.
double NegativeLogLikelihood(const FrequencyModel& m,
                             const FactoredCovariances& stats);

FrequencyModel InitParameters(const StackedObservations& obs,
                              const ModelConfig& cfg);
FrequencyModel InitParameters(const SpectrogramTensor& s,
                              const ModelConfig& cfg, int k);

// Pins the scale ambiguity between v and the taps: with
// c = tr(R_0 block) / N_m, divides every tap by c and multiplies v (and its
// floor) by c. Assembled covariances are unchanged.
void RenormalizeScale(FrequencyModel& m);

// True when every tap is exactly zero outside its leading block.
bool HasTapZeroPattern(const FrequencyModel& m);

// Checks shapes and the zero pattern; throws InvalidArgument.
void ValidateModel(const FrequencyModel& m);

}  // namespace tvcov

#endif  // TVCOV_MODEL_HPP_
