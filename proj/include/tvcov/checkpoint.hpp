// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_CHECKPOINT_HPP_
#define TVCOV_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include "tvcov/model.hpp"

namespace tvcov {

// Model checkpoints are JSON documents:
//
//   {
//     "format": "tvcov-model", "version": 1,
//     "n_mics": 2, "stack_length": 6, "tap_length": 6,
//     "frequencies": [
//       { "bin": 0, "variance_floor": ..., "source_variance": [...],
//         "taps": [ {"block": 2, "re": [...], "im": [...]}, ... ],
//         "noise": {"block": 12, "re": [...], "im": [...]} },
//       ...
//     ]
//   }
//
// Hermitian blocks are packed as their upper triangle in row-major order
// (i <= j). Doubles are written with round-trip precision.
inline constexpr int kCheckpointVersion = 1;

std::string SerializeModels(const std::vector<FrequencyModel>& models);
std::vector<FrequencyModel> DeserializeModels(const std::string& text);

void SaveModels(const std::string& path,
                const std::vector<FrequencyModel>& models);
std::vector<FrequencyModel> LoadModels(const std::string& path);

}  // namespace tvcov

#endif  // TVCOV_CHECKPOINT_HPP_
