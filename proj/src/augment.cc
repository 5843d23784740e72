// augment.cc

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

#include "voclab/augment.h"

#include <algorithm>
#include <cmath>

#include "voclab/errors.h"
#include "voclab/rng.h"

namespace voclab {

void AugmentConfig::Validate() const {
  if (filter_order < 0) throw ConfigError("aug filter_order must be >= 0");
  if (!(filter_spread >= 0.0)) throw ConfigError("aug filter_spread must be >= 0");
  if (!(snr_min_db <= snr_max_db))
    throw ConfigError("aug snr_min_db must not exceed snr_max_db");
}

AugmentResult AugmentDetailed(const Waveform &w, const AugmentConfig &cfg,
                              uint64_t seed) {
  cfg.Validate();
  ValidateWaveform(w);
  Rng rng(seed);
  AugmentResult res;
  res.taps.assign(cfg.filter_order + 1, 0.0);
  res.taps[0] = 1.0;
  for (int k = 1; k <= cfg.filter_order; ++k)
    res.taps[k] = cfg.filter_spread * rng.Normal() / k;
  double l1 = 0.0;
  for (double t : res.taps) l1 += std::abs(t);
  for (double &t : res.taps) t /= l1;
  res.snr_db = rng.Uniform(cfg.snr_min_db, cfg.snr_max_db);

  const size_t n = w.samples.size();
  std::vector<double> colored(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < res.taps.size() && k <= i; ++k)
      colored[i] += res.taps[k] * w.samples[i - k];
  double signal_power = 0.0;
  for (double v : colored) signal_power += v * v;
  signal_power /= std::max<size_t>(n, 1);

  std::vector<double> noise(n);
  double noise_power = 0.0;
  for (double &v : noise) {
    v = rng.Normal();
    noise_power += v * v;
  }
  noise_power /= std::max<size_t>(n, 1);
  const double target = signal_power / std::pow(10.0, res.snr_db / 10.0);
  const double gain = noise_power > 0 ? std::sqrt(target / noise_power) : 0.0;

  res.output.id = w.id;
  res.output.sample_rate = w.sample_rate;
  res.output.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    res.output.samples[i] = std::clamp(colored[i] + gain * noise[i], -1.0, 1.0);
  return res;
}

Waveform Augment(const Waveform &w, const AugmentConfig &cfg, uint64_t seed) {
  return AugmentDetailed(w, cfg, seed).output;
}

}  // namespace voclab
