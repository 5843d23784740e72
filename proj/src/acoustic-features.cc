// acoustic-features.cc

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

#include "voclab/acoustic-features.h"

#include <algorithm>
#include <cmath>

#include "voclab/errors.h"
#include "voclab/spectral.h"

namespace voclab {

void FeatureConfig::Validate() const {
  if (window <= 0) throw ConfigError("feature window must be positive");
  if (hop <= 0) throw ConfigError("feature hop must be positive");
  if (n_fft < window) throw ConfigError("n_fft must be >= window");
  if (n_mels <= 0) throw ConfigError("n_mels must be positive");
  if (!(f0_min > 0 && f0_min < f0_max))
    throw ConfigError("f0_min/f0_max must satisfy 0 < f0_min < f0_max");
}

double FramePitch(const double *frame, int length, const FeatureConfig &cfg) {
  std::vector<double> x(frame, frame + length);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= length;
  double energy = 0.0;
  for (double &v : x) {
    v -= mean;
    energy += v * v;
  }
  if (energy / length < 1e-8) return 0.0;

  const int lag_min = std::max(2, static_cast<int>(kSampleRate / cfg.f0_max));
  const int lag_max =
      std::min(length - 2, static_cast<int>(std::ceil(kSampleRate / cfg.f0_min)));
  if (lag_max <= lag_min + 1) return 0.0;
  std::vector<double> r(lag_max + 2, 0.0);
  for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (int n = 0; n + lag < length; ++n) {
      xy += x[n] * x[n + lag];
      xx += x[n] * x[n];
      yy += x[n + lag] * x[n + lag];
    }
    r[lag] = (xx > 0 && yy > 0) ? xy / std::sqrt(xx * yy) : 0.0;
  }
  double best = -1.0;
  for (int lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, r[lag]);
  if (best < cfg.voicing_threshold) return 0.0;
  // Shortest-lag local maximum close to the global one avoids sub-octave
  // errors.
  for (int lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      const double a = r[lag - 1], b = r[lag], c = r[lag + 1];
      const double denom = a - 2 * b + c;
      double shift = denom < 0 ? 0.5 * (a - c) / denom : 0.0;
      shift = std::clamp(shift, -0.5, 0.5);
      const double f0 = kSampleRate / (lag + shift);
      return (f0 >= cfg.f0_min && f0 <= cfg.f0_max) ? f0 : 0.0;
    }
  }
  return 0.0;
}

AcousticFeatures ExtractFeatures(const Waveform &w, const FeatureConfig &cfg) {
  cfg.Validate();
  if (w.samples.size() < static_cast<size_t>(cfg.window))
    throw InputError("waveform " + w.id + " has " +
                     std::to_string(w.samples.size()) +
                     " samples, shorter than one analysis window (" +
                     std::to_string(cfg.window) + ")");
  const auto spec = Stft(w.samples, cfg.window, cfg.hop, cfg.n_fft);
  const Matrix fb = MelFilterbank(cfg.n_mels, cfg.n_fft, kSampleRate);
  const int frames = static_cast<int>(spec.size());
  const int n_bins = cfg.n_fft / 2 + 1;

  Matrix power(frames, n_bins);
  for (int t = 0; t < frames; ++t)
    for (int k = 0; k < n_bins; ++k) power(t, k) = std::norm(spec[t][k]);

  AcousticFeatures feat;
  feat.mel = ((power * fb.transpose()).array() + kLogMelFloor).log().matrix();
  feat.frame_shift = static_cast<double>(cfg.hop) / kSampleRate;
  feat.source_id = w.id;
  feat.window = cfg.window;
  feat.hop = cfg.hop;
  feat.n_fft = cfg.n_fft;
  feat.num_samples = w.samples.size();
  if (cfg.with_f0) {
    feat.f0.resize(frames);
    for (int t = 0; t < frames; ++t)
      feat.f0[t] = FramePitch(w.samples.data() + t * cfg.hop, cfg.window, cfg);
  }
  return feat;
}

void ValidateFeatures(const AcousticFeatures &feat) {
  if (feat.mel.rows() < 1 || feat.mel.cols() < 1)
    throw InputError("features " + feat.source_id + " are empty");
  if (!feat.mel.allFinite())
    throw InputError("features " + feat.source_id + " contain NaN/Inf");
  if (feat.has_f0()) {
    if (static_cast<Eigen::Index>(feat.f0.size()) != feat.mel.rows())
      throw InputError("features " + feat.source_id +
                       ": f0 length differs from mel frame count");
    for (double f : feat.f0)
      if (!(f == 0.0 || (f >= 50.0 && f <= 500.0)))
        throw InputError("features " + feat.source_id +
                         ": f0 value outside {0} U [50, 500]");
  }
  if (feat.window <= 0 || feat.hop <= 0 || feat.n_fft < feat.window ||
      feat.mel.cols() < 1)
    throw InputError("features " + feat.source_id +
                     " carry invalid analysis parameters");
}

}  // namespace voclab
