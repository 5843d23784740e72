// waveform-synth.cc

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

#include "voclab/waveform-synth.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "voclab/errors.h"
#include "voclab/rng.h"

namespace voclab {

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// Two-pole resonator normalised to unit gain at its centre frequency.
class Resonator {
 public:
  Resonator(double freq, double bandwidth) {
    const double r = std::exp(-std::numbers::pi * bandwidth / kSampleRate);
    const double theta = kTwoPi * freq / kSampleRate;
    a1_ = 2.0 * r * std::cos(theta);
    a2_ = -r * r;
    // |1 - a1 z^-1 - a2 z^-2| at z = e^{j theta}.
    const std::complex<double> z = std::polar(1.0, -theta);
    gain_ = std::abs(1.0 - a1_ * z - a2_ * z * z);
  }
  double Step(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

}  // namespace

void CorpusConfig::Validate() const {
  if (n_utts < 1) throw ConfigError("n_utts must be >= 1");
  if (!(duration_s >= 0.5 && duration_s <= 10.0))
    throw ConfigError("duration_s must lie in [0.5, 10]");
  if (!(f0_min >= 50.0 && f0_max <= 500.0 && f0_min < f0_max))
    throw ConfigError("f0_min/f0_max must satisfy 50 <= f0_min < f0_max <= 500");
  if (!(formant_scale > 0.5 && formant_scale < 2.0))
    throw ConfigError("formant_scale must lie in (0.5, 2)");
  if (!(breath_level >= 0.0 && breath_level <= 0.2))
    throw ConfigError("breath_level must lie in [0, 0.2]");
  if (!(dev_fraction >= 0.0 && test_fraction >= 0.0 &&
        dev_fraction + test_fraction <= 1.0))
    throw ConfigError("dev_fraction + test_fraction must be <= 1");
  if (test_subset.rfind("test-", 0) != 0)
    throw ConfigError("test_subset must start with 'test-'");
  if (id_prefix.empty() || id_prefix.find_first_of("\t\n_") != std::string::npos)
    throw ConfigError("id_prefix must be non-empty without tabs/underscores");
}

std::string UtteranceId(const CorpusConfig &cfg, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", index);
  return cfg.id_prefix + "-" + buf;
}

Waveform SynthUtterance(const CorpusConfig &cfg, int index) {
  Rng rng(DeriveSeed(cfg.seed, static_cast<uint64_t>(index)));
  const size_t n = static_cast<size_t>(std::lround(cfg.duration_s * kSampleRate));

  // Pitch contour: slow intonation plus vibrato, clamped to the range.
  const double span = cfg.f0_max - cfg.f0_min;
  const double center = cfg.f0_min + span * rng.Uniform(0.35, 0.65);
  const double depth = span * rng.Uniform(0.15, 0.3);
  const double rate = rng.Uniform(0.7, 2.5);
  const double phase0 = rng.Uniform(0.0, kTwoPi);
  const double vib_rate = rng.Uniform(4.0, 6.5);
  const double vib_depth = span * 0.03;

  const int n_formants = 2 + static_cast<int>(rng.UniformInt(3));
  const double lo[4] = {300, 900, 2300, 3300}, hi[4] = {800, 2200, 3000, 4000};
  std::vector<Resonator> formants;
  std::vector<double> formant_gain;
  for (int f = 0; f < n_formants; ++f) {
    const double freq = cfg.formant_scale * rng.Uniform(lo[f], hi[f]);
    formants.emplace_back(std::min(freq, 7000.0), rng.Uniform(60.0, 150.0));
    formant_gain.push_back(0.6 / (f + 1));
  }

  // Syllable-like amplitude envelope.
  const double syl_rate = rng.Uniform(3.0, 5.0);
  const double syl_phase = rng.Uniform(0.0, kTwoPi);

  Waveform w;
  w.id = UtteranceId(cfg, index);
  w.samples.resize(n);
  double phase = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double f0 = center + depth * std::sin(kTwoPi * rate * t + phase0) +
                vib_depth * std::sin(kTwoPi * vib_rate * t);
    f0 = std::clamp(f0, cfg.f0_min, cfg.f0_max);
    phase += kTwoPi * f0 / kSampleRate;
    if (phase > kTwoPi) phase -= kTwoPi;
    // Glottal-style source: harmonics with -12 dB/octave tilt.
    double src = 0.0;
    const int n_harm = static_cast<int>(0.45 * kSampleRate / f0);
    for (int k = 1; k <= n_harm; ++k) src += std::sin(k * phase) / (k * k);
    const double env =
        0.55 + 0.45 * std::sin(kTwoPi * syl_rate * t + syl_phase);
    double y = src;
    for (int f = 0; f < n_formants; ++f)
      y += formant_gain[f] * formants[f].Step(src);
    y = env * y + cfg.breath_level * (0.5 + env) * rng.Normal();
    w.samples[i] = y;
  }
  PeakNormalize(w.samples, 0.9);
  return w;
}

std::vector<Waveform> SynthBonafide(const CorpusConfig &cfg) {
  cfg.Validate();
  std::vector<Waveform> out;
  out.reserve(cfg.n_utts);
  for (int i = 0; i < cfg.n_utts; ++i) out.push_back(SynthUtterance(cfg, i));
  return out;
}

}  // namespace voclab
