// voclab/acoustic-features.h

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

#ifndef VOCLAB_ACOUSTIC_FEATURES_H_
#define VOCLAB_ACOUSTIC_FEATURES_H_

#include <string>
#include <vector>

#include "voclab/autograd.h"
#include "voclab/wav-io.h"

namespace voclab {

inline constexpr double kLogMelFloor = 1e-10;

struct FeatureConfig {
  int window = 400;  // 25 ms
  int hop = 160;     // 10 ms
  int n_fft = 512;
  int n_mels = 80;
  bool with_f0 = false;
  double f0_min = 50.0;
  double f0_max = 500.0;
  // Minimum normalised autocorrelation peak for a frame to count as voiced.
  double voicing_threshold = 0.5;

  void Validate() const;
};

// Log-mel matrix (frames x n_mels) plus optional F0 track in Hz (0 means
// unvoiced).
struct AcousticFeatures {
  Matrix mel;
  std::vector<double> f0;
  double frame_shift = 0.01;
  std::string source_id;
  // Analysis parameters needed to invert the features.
  int window = 400;
  int hop = 160;
  int n_fft = 512;
  size_t num_samples = 0;

  bool has_f0() const { return !f0.empty(); }
};

// Frames: floor((num_samples - window) / hop) + 1.
// mel = log(fbank * |STFT|^2 + 1e-10) with a Hann window.
AcousticFeatures ExtractFeatures(const Waveform &w, const FeatureConfig &cfg);

// Autocorrelation pitch of a single frame; 0 when unvoiced.
double FramePitch(const double *frame, int length, const FeatureConfig &cfg);

void ValidateFeatures(const AcousticFeatures &feat);

}  // namespace voclab

#endif  // VOCLAB_ACOUSTIC_FEATURES_H_
