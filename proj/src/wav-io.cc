// wav-io.cc

// Copyright 2026  The voclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voclab/wav-io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "voclab/errors.h"

namespace voclab {

namespace {

void PutU32(std::ostream &os, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char *>(b), 4);
}

void PutU16(std::ostream &os, uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char *>(b), 2);
}

uint32_t U32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t U16(const unsigned char *p) { return p[0] | (p[1] << 8); }

}  // namespace

void WriteWav(const std::string &path, const Waveform &w) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  PutU32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  PutU32(os, 16);
  PutU16(os, 1);  // PCM
  PutU16(os, 1);  // mono
  PutU32(os, static_cast<uint32_t>(w.sample_rate));
  PutU32(os, static_cast<uint32_t>(w.sample_rate * 2));
  PutU16(os, 2);
  PutU16(os, 16);
  os.write("data", 4);
  PutU32(os, data_bytes);
  std::vector<unsigned char> buf(data_bytes);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double x = std::clamp(w.samples[i], -1.0, 1.0);
    const int16_t q = static_cast<int16_t>(std::lround(x * 32767.0));
    const uint16_t u = static_cast<uint16_t>(q);
    buf[2 * i] = static_cast<unsigned char>(u & 0xff);
    buf[2 * i + 1] = static_cast<unsigned char>(u >> 8);
  }
  os.write(reinterpret_cast<const char *>(buf.data()), data_bytes);
  if (!os) throw IoError("write failed for " + path);
}

Waveform ReadWav(const std::string &path, const std::string &id) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open audio file " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path);
  size_t pos = 12;
  int channels = 0, bits = 0, rate = 0, format = 0;
  const unsigned char *data = nullptr;
  size_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const uint32_t len = U32(chunk + 4);
    if (pos + 8 + len > bytes.size()) throw IoError("truncated chunk in " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && len >= 16) {
      format = U16(chunk + 8);
      channels = U16(chunk + 10);
      rate = static_cast<int>(U32(chunk + 12));
      bits = U16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (format != 1 || channels != 1 || bits != 16)
    throw IoError("expected mono 16-bit PCM in " + path);
  if (rate != kSampleRate)
    throw IoError("expected 16000 Hz, got " + std::to_string(rate) + " in " +
                  path);
  if (data == nullptr) throw IoError("missing data chunk in " + path);
  Waveform w;
  w.id = id;
  w.sample_rate = rate;
  w.samples.resize(data_len / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const int16_t q = static_cast<int16_t>(U16(data + 2 * i));
    w.samples[i] = std::max(-1.0, q / 32767.0);
  }
  return w;
}

void ValidateWaveform(const Waveform &w) {
  if (w.sample_rate != kSampleRate)
    throw InputError("waveform " + w.id + " has sample rate " +
                     std::to_string(w.sample_rate) + ", expected 16000");
  for (double x : w.samples)
    if (!std::isfinite(x) || x < -1.0 || x > 1.0)
      throw InputError("waveform " + w.id + " has samples outside [-1, 1]");
}

void PeakNormalize(std::vector<double> &x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m <= 0.0) return;
  const double g = peak / m;
  for (double &v : x) v *= g;
}

}  // namespace voclab
