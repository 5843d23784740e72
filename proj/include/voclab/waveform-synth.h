// voclab/waveform-synth.h

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

#ifndef VOCLAB_WAVEFORM_SYNTH_H_
#define VOCLAB_WAVEFORM_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "voclab/wav-io.h"

namespace voclab {

// Settings for the synthetic bona fide corpus.  The style fields let a second
// corpus differ in "speaker pool" from the first.
struct CorpusConfig {
  int n_utts = 100;
  double duration_s = 1.0;
  uint64_t seed = 0;
  double f0_min = 90.0;   // Hz
  double f0_max = 220.0;  // Hz
  double formant_scale = 1.0;
  double breath_level = 0.02;
  std::string id_prefix = "bona";
  // Subset split used by BuildCorpus (index order: train, dev, test).
  double dev_fraction = 0.1;
  double test_fraction = 0.2;
  std::string test_subset = "test-main";

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

std::string UtteranceId(const CorpusConfig &cfg, int index);

// Harmonic glottal-style source with a time-varying pitch contour inside
// [f0_min, f0_max], 2-4 parallel formant resonators and breath noise;
// peak-normalised to 0.9.  Utterance i depends only on (seed, i).
std::vector<Waveform> SynthBonafide(const CorpusConfig &cfg);
Waveform SynthUtterance(const CorpusConfig &cfg, int index);

}  // namespace voclab

#endif  // VOCLAB_WAVEFORM_SYNTH_H_
