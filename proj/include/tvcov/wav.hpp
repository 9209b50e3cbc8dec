// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_WAV_HPP_
#define TVCOV_WAV_HPP_

#include <string>

#include "tvcov/stft.hpp"

namespace tvcov {

enum class WavFormat { kPcm16, kFloat32 };

// Reads RIFF/WAVE PCM 16-bit or IEEE float 32-bit, any channel count.
// Samples are scaled to [-1, 1]. Throws MissingFileError or InvalidArgument.
Waveform ReadWav(const std::string& path);

// PCM 16 output is clipped to [-1, 1] and rounded to nearest.
void WriteWav(const std::string& path, const Waveform& w,
              WavFormat format = WavFormat::kFloat32);

}  // namespace tvcov

#endif  // TVCOV_WAV_HPP_
