// vocoder.cc

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

#include "voclab/vocoder.h"

#include <cmath>
#include <numbers>

#include "voclab/errors.h"
#include "voclab/rng.h"
#include "voclab/spectral.h"

namespace voclab {

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Waveform GriffinLim(const AcousticFeatures &feat, uint64_t seed) {
  const Matrix power = InvertMel(feat);
  const int frames = static_cast<int>(power.rows());
  const int n_bins = static_cast<int>(power.cols());
  const Matrix mag = power.cwiseSqrt();

  Rng rng(seed);
  std::vector<std::vector<Complex>> spec(frames, std::vector<Complex>(n_bins));
  for (int t = 0; t < frames; ++t)
    for (int k = 0; k < n_bins; ++k)
      spec[t][k] = std::polar(mag(t, k), rng.Uniform(0.0, kTwoPi));

  std::vector<double> x;
  for (int it = 0; it < kGriffinIterations; ++it) {
    x = Istft(spec, feat.window, feat.hop, feat.n_fft);
    const auto rebuilt = Stft(x, feat.window, feat.hop, feat.n_fft);
    for (int t = 0; t < frames; ++t)
      for (int k = 0; k < n_bins; ++k) {
        const double a = std::abs(rebuilt[t][k]);
        spec[t][k] = a > 0 ? rebuilt[t][k] * (mag(t, k) / a)
                           : Complex(mag(t, k), 0.0);
      }
  }
  Waveform w;
  w.samples = Istft(spec, feat.window, feat.hop, feat.n_fft);
  return w;
}

// Linear interpolation of a per-bin spectrum at frequency f (Hz).
double SampleSpectrum(const Matrix &power, int frame, double f, int n_fft) {
  const double pos = f * n_fft / kSampleRate;
  const int k = static_cast<int>(pos);
  if (k + 1 >= power.cols()) return power(frame, power.cols() - 1);
  const double a = pos - k;
  return (1.0 - a) * power(frame, k) + a * power(frame, k + 1);
}

Waveform HarmonicPlusNoise(const AcousticFeatures &feat, uint64_t seed) {
  const Matrix power = InvertMel(feat);
  const int frames = static_cast<int>(power.rows());
  const int n_bins = static_cast<int>(power.cols());
  const size_t len = static_cast<size_t>(frames - 1) * feat.hop + feat.window;
  const std::vector<double> win = HannWindow(feat.window);
  double win_sum = 0.0;
  for (double v : win) win_sum += v;
  const double bin_hz = static_cast<double>(kSampleRate) / feat.n_fft;

  // Frame centres anchor the per-sample interpolation of f0 and amplitudes.
  auto frame_pos = [&](size_t i) {
    const double c = (static_cast<double>(i) - feat.window / 2.0) / feat.hop;
    return std::clamp(c, 0.0, static_cast<double>(frames - 1));
  };

  const int max_harm = static_cast<int>(0.49 * kSampleRate / 50.0);
  // Per-frame harmonic amplitudes: a sinusoid of amplitude A peaks at
  // A * sum(w) / 2 in the windowed spectrum; the mel envelope spreads that
  // energy over f0 / bin_hz bins.
  Matrix amps = Matrix::Zero(frames, max_harm);
  for (int t = 0; t < frames; ++t) {
    const double f0 = feat.f0[t];
    if (f0 <= 0) continue;
    for (int k = 1; k <= max_harm && k * f0 < 0.49 * kSampleRate; ++k) {
      const double p = SampleSpectrum(power, t, k * f0, feat.n_fft);
      amps(t, k - 1) = 2.0 / win_sum * std::sqrt(p * f0 / bin_hz);
    }
  }

  std::vector<double> harmonic(len, 0.0);
  double phase = 0.0;
  for (size_t i = 0; i < len; ++i) {
    const double pos = frame_pos(i);
    const int t0 = static_cast<int>(pos);
    const int t1 = std::min(t0 + 1, frames - 1);
    const double a = pos - t0;
    const double f0a = feat.f0[t0], f0b = feat.f0[t1];
    double f0;
    if (f0a > 0 && f0b > 0) f0 = (1 - a) * f0a + a * f0b;
    else f0 = f0a > 0 ? f0a : f0b;
    if (f0 <= 0) continue;
    phase += kTwoPi * f0 / kSampleRate;
    if (phase > kTwoPi) phase -= kTwoPi;
    double y = 0.0;
    for (int k = 1; k <= max_harm && k * f0 < 0.49 * kSampleRate; ++k) {
      const double amp = (1 - a) * amps(t0, k - 1) + a * amps(t1, k - 1);
      if (amp > 0) y += amp * std::sin(k * phase);
    }
    harmonic[i] = y;
  }

  // Noise: random-phase spectrum shaped by the envelope, attenuated in
  // voiced frames.
  Rng rng(seed);
  std::vector<std::vector<Complex>> noise_spec(frames,
                                               std::vector<Complex>(n_bins));
  for (int t = 0; t < frames; ++t) {
    const double g = feat.f0[t] > 0 ? 0.25 : 1.0;
    for (int k = 0; k < n_bins; ++k)
      noise_spec[t][k] =
          std::polar(g * std::sqrt(power(t, k)), rng.Uniform(0.0, kTwoPi));
  }
  const std::vector<double> noise =
      Istft(noise_spec, feat.window, feat.hop, feat.n_fft);

  Waveform w;
  w.samples.resize(len);
  for (size_t i = 0; i < len; ++i) w.samples[i] = harmonic[i] + noise[i];
  return w;
}

}  // namespace

const std::vector<std::string> &KnownVocoders() {
  static const std::vector<std::string> ids = {"griffin", "harmnoise"};
  return ids;
}

Matrix InvertMel(const AcousticFeatures &feat) {
  const Matrix fb = MelFilterbank(static_cast<int>(feat.mel.cols()),
                                  feat.n_fft, kSampleRate);
  // Target mel energies (n_mels x frames).
  const Matrix target =
      (feat.mel.array().min(50.0).exp() - kLogMelFloor).max(0.0).matrix().transpose();
  // Non-negative least squares by multiplicative updates, starting from the
  // normalised transpose.
  const Eigen::VectorXd col_mass = fb.colwise().sum().transpose();
  Matrix spec = fb.transpose() * target;  // bins x frames
  for (Eigen::Index k = 0; k < spec.rows(); ++k)
    spec.row(k) /= std::max(col_mass(k), 1e-3);
  spec = spec.cwiseMax(0.0).array() + 1e-12;
  const Matrix gram = fb.transpose() * fb;
  const Matrix numer = fb.transpose() * target;
  for (int it = 0; it < 30; ++it) {
    const Matrix denom = (gram * spec).array() + 1e-20;
    spec = spec.cwiseProduct(numer.cwiseQuotient(denom));
  }
  return spec.transpose();
}

Waveform Vocode(const AcousticFeatures &feat, const std::string &vocoder_id,
                uint64_t seed) {
  Waveform w;
  if (vocoder_id == "griffin") {
    ValidateFeatures(feat);
    w = GriffinLim(feat, seed);
  } else if (vocoder_id == "harmnoise") {
    if (!feat.has_f0())
      throw InputError("harmnoise vocoder requires an F0 track (features " +
                       feat.source_id + " have none)");
    ValidateFeatures(feat);
    w = HarmonicPlusNoise(feat, seed);
  } else {
    throw ConfigError("unknown vocoder_id '" + vocoder_id +
                      "' (expected griffin or harmnoise)");
  }
  PeakNormalize(w.samples, 0.9);
  w.id = feat.source_id + "__" + vocoder_id;
  w.sample_rate = kSampleRate;
  return w;
}

}  // namespace voclab
