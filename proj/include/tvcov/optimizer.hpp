// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_OPTIMIZER_HPP_
#define TVCOV_OPTIMIZER_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tvcov/model.hpp"

namespace tvcov {

// Majorization-minimization updates. Each update family recomputes the
// per-frame inverses from the current parameters once and then applies the
// closed-form minimizer of the auxiliary function, so the negative
// log-likelihood never increases.

// v_l <- v_l * sqrt(sum_d tr(R^-1 Rhat R^-1 R_d) / sum_d tr(R^-1 R_d)),
// evaluated at frames l + d, then floored. Throws NumericalError when a
// denominator vanishes.
FrequencyModel UpdateSourceVariance(const FrequencyModel& m,
                                    const StackedObservations& obs);

// R_d <- inv(G_d) # (R_d J_d R_d) on the leading block of every tap, with
//   G_d = sum_l v_{l-d} R_l^-1,  J_d = sum_l v_{l-d} R_l^-1 Rhat_l R_l^-1.
// Taps whose G_d block is not positive definite are left unchanged and
// their indices appended to `skipped`.
FrequencyModel UpdateTapCovariances(const FrequencyModel& m,
                                    const StackedObservations& obs,
                                    double pd_floor_rel = kDefaultPdFloor,
                                    std::vector<int>* skipped = nullptr);

// R_v <- inv(F) # (R_v E R_v) with F = sum_l R_l^-1 and
// E = sum_l R_l^-1 Rhat_l R_l^-1.
FrequencyModel UpdateNoiseCovariance(const FrequencyModel& m,
                                     const StackedObservations& obs,
                                     double pd_floor_rel = kDefaultPdFloor);

// The same updates driven by general empirical covariances instead of
// single snapshots.
FrequencyModel UpdateSourceVariance(const FrequencyModel& m,
                                    const FactoredCovariances& stats);
FrequencyModel UpdateTapCovariances(const FrequencyModel& m,
                                    const FactoredCovariances& stats,
                                    double pd_floor_rel = kDefaultPdFloor,
                                    std::vector<int>* skipped = nullptr);
FrequencyModel UpdateNoiseCovariance(const FrequencyModel& m,
                                     const FactoredCovariances& stats,
                                     double pd_floor_rel = kDefaultPdFloor);

enum class UpdateStage {
  kInit,
  kSourceVariance,
  kTapCovariances,
  kNoiseCovariance,
  kRenormalize,
};

const char* StageName(UpdateStage stage);

// Called after every stage with the iteration index (0 for kInit).
using StageObserver =
    std::function<void(int iteration, UpdateStage stage, const FrequencyModel&)>;

struct FrequencyFit {
  FrequencyModel model;
  // costs[0] after initialization, costs[i] after iteration i.
  std::vector<double> costs;
  std::vector<int> skipped_taps;
};

// Initializes from `obs` and runs cfg.n_iterations rounds of
// {v, taps, noise, scale renormalization}.
FrequencyFit FitFrequency(const StackedObservations& obs,
                          const ModelConfig& cfg,
                          const StageObserver& observer = {});

struct CostTrace {
  // per_frequency[k][i]: cost of bin k after iteration i (i = 0 is init).
  std::vector<std::vector<double>> per_frequency;
  // total[i]: sum over bins that did not fail.
  std::vector<double> total;

  int num_iterations() const { return total.empty() ? 0 : int(total.size()) - 1; }
};

struct FrequencyFailure {
  int frequency = -1;
  int frame = -1;
  std::string message;
};

struct FitResult {
  std::vector<FrequencyModel> models;
  CostTrace trace;
  // Bins whose fit broke down; their model holds the initialization.
  std::vector<FrequencyFailure> failures;

  // Throws NumericalError for the first failure, if any.
  void ThrowIfFailed() const;
};

struct FitOptions {
  // Worker threads for the map over frequencies; 0 picks the hardware count.
  int threads = 1;
};

// Fits every frequency bin of s independently.
FitResult Iterate(const SpectrogramTensor& s, const ModelConfig& cfg,
                  const FitOptions& options = {});

// CSV with columns iteration,frequency,cost,total for iterations 1..n.
void WriteCostCsv(std::ostream& os, const CostTrace& trace);

}  // namespace tvcov

#endif  // TVCOV_OPTIMIZER_HPP_
