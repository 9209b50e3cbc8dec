// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tvcov/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "tvcov/error.hpp"

namespace tvcov {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
uint16_t ReadU16(const unsigned char* p) {
  return uint16_t(p[0] | p[1] << 8);
}

void PutU32(std::vector<unsigned char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}
void PutU16(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}
void PutTag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFileError(path);
  std::ifstream is(path, std::ios::binary);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  auto bad = [&](const std::string& why) {
    return InvalidArgument(path + ": " + why);
  };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw bad("not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    const std::size_t size = ReadU32(chunk + 4);
    const std::size_t avail = std::min(size, buf.size() - pos - 8);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw bad("truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26)
        format = ReadU16(chunk + 8 + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos += 8 + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw bad("missing fmt chunk");
  if (!data) throw bad("missing data chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) throw bad("only 16-bit PCM and 32-bit float are supported");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  Waveform w = Waveform::Zeros(channels, frames, double(rate));
  for (std::size_t n = 0; n < frames; ++n)
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (n * channels + c) * width;
      if (pcm16) {
        w.channels[c][n] = int16_t(ReadU16(p)) / 32768.0;
      } else {
        const uint32_t u = ReadU32(p);
        float f;
        std::memcpy(&f, &u, 4);
        w.channels[c][n] = f;
      }
    }
  return w;
}

void WriteWav(const std::string& path, const Waveform& w, WavFormat format) {
  w.Validate();
  if (w.num_channels() == 0) throw InvalidArgument("no channels to write");
  const uint16_t channels = uint16_t(w.num_channels());
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint32_t rate = uint32_t(std::lround(w.sample_rate));
  const uint32_t data_size = uint32_t(w.num_samples() * channels * bits / 8);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_size);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, channels);
  PutU32(out, rate);
  PutU32(out, rate * channels * bits / 8);
  PutU16(out, uint16_t(channels * bits / 8));
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_size);
  for (std::size_t n = 0; n < w.num_samples(); ++n)
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = w.channels[c][n];
      if (format == WavFormat::kPcm16) {
        const double clipped = std::clamp(x, -1.0, 1.0);
        const long q = std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L);
        PutU16(out, uint16_t(int16_t(q)));
      } else {
        const float f = float(x);
        uint32_t u;
        std::memcpy(&u, &f, 4);
        PutU32(out, u);
      }
    }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
}

}  // namespace tvcov
