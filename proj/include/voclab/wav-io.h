// voclab/wav-io.h

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

#ifndef VOCLAB_WAV_IO_H_
#define VOCLAB_WAV_IO_H_

#include <string>
#include <vector>

namespace voclab {

inline constexpr int kSampleRate = 16000;

// Mono audio in [-1, 1] tagged with an utterance id.
struct Waveform {
  std::string id;
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

// Writes mono 16-bit PCM.  Samples are clipped to [-1, 1] and scaled by
// 32767 with round-to-nearest.
void WriteWav(const std::string &path, const Waveform &w);

// Reads a mono 16-bit PCM file at 16 kHz; samples are divided by 32767.
Waveform ReadWav(const std::string &path, const std::string &id = "");

// Throws InputError unless every sample is finite and within [-1, 1] and
// the rate is 16 kHz.
void ValidateWaveform(const Waveform &w);

// Scales so that max |x| equals `peak`; all-zero input is returned as is.
void PeakNormalize(std::vector<double> &x, double peak);

}  // namespace voclab

#endif  // VOCLAB_WAV_IO_H_
