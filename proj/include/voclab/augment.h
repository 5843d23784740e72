// voclab/augment.h

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

#ifndef VOCLAB_AUGMENT_H_
#define VOCLAB_AUGMENT_H_

#include <cstdint>
#include <vector>

#include "voclab/wav-io.h"

namespace voclab {

// Two-stage corruption: a random causal FIR coloration followed by white
// Gaussian noise at an SNR drawn from [snr_min_db, snr_max_db].
struct AugmentConfig {
  int filter_order = 4;
  double filter_spread = 0.5;
  double snr_min_db = 10.0;
  double snr_max_db = 30.0;

  void Validate() const;
};

struct AugmentResult {
  Waveform output;
  // Filter taps, normalised to unit L1 norm so the colored signal never
  // exceeds the input peak.
  std::vector<double> taps;
  double snr_db = 0.0;
};

AugmentResult AugmentDetailed(const Waveform &w, const AugmentConfig &cfg,
                              uint64_t seed);
Waveform Augment(const Waveform &w, const AugmentConfig &cfg, uint64_t seed);

}  // namespace voclab

#endif  // VOCLAB_AUGMENT_H_
