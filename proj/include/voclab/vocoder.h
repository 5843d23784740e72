// voclab/vocoder.h

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

#ifndef VOCLAB_VOCODER_H_
#define VOCLAB_VOCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "voclab/acoustic-features.h"
#include "voclab/wav-io.h"

namespace voclab {

inline constexpr int kGriffinIterations = 32;

// Copy-synthesis vocoders: "griffin" (iterative phase reconstruction from
// the mel spectrogram) and "harmnoise" (harmonic-plus-noise resynthesis from
// F0 and the mel envelope).
const std::vector<std::string> &KnownVocoders();

// Output length is (frames-1)*hop + window, within one hop of the source;
// peak-normalised to 0.9.  Throws ConfigError for an unknown id and
// InputError when harmnoise is given features without F0.
Waveform Vocode(const AcousticFeatures &feat, const std::string &vocoder_id,
                uint64_t seed);

// Non-negative linear power spectrogram (frames x n_fft/2+1) whose mel
// projection approximates exp(mel) - floor.
Matrix InvertMel(const AcousticFeatures &feat);

}  // namespace voclab

#endif  // VOCLAB_VOCODER_H_
