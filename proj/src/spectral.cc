// spectral.cc

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

#include "voclab/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "voclab/errors.h"

namespace voclab {

struct RealFft::Impl {
  double *real = nullptr;
  fftw_complex *spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw InputError("FFT size must be >= 2");
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  impl_->forward = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec,
                                        FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real,
                                        FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void RealFft::Forward(const double *in, Complex *out) {
  std::copy(in, in + n_, impl_->real);
  fftw_execute(impl_->forward);
  for (int k = 0; k <= n_ / 2; ++k)
    out[k] = Complex(impl_->spec[k][0], impl_->spec[k][1]);
}

void RealFft::Inverse(const Complex *in, double *out) {
  for (int k = 0; k <= n_ / 2; ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inverse);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = impl_->real[i] * scale;
}

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (length - 1));
  return w;
}

int NumFrames(size_t num_samples, int window, int hop) {
  if (num_samples < static_cast<size_t>(window)) return 0;
  return static_cast<int>((num_samples - window) / hop) + 1;
}

std::vector<std::vector<Complex>> Stft(const std::vector<double> &x,
                                       int window, int hop, int n_fft) {
  const int frames = NumFrames(x.size(), window, hop);
  const std::vector<double> win = HannWindow(window);
  RealFft fft(n_fft);
  std::vector<double> buf(n_fft, 0.0);
  std::vector<std::vector<Complex>> out(frames,
                                        std::vector<Complex>(n_fft / 2 + 1));
  for (int t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < window; ++i) buf[i] = x[t * hop + i] * win[i];
    fft.Forward(buf.data(), out[t].data());
  }
  return out;
}

std::vector<double> Istft(const std::vector<std::vector<Complex>> &spec,
                          int window, int hop, int n_fft) {
  const int frames = static_cast<int>(spec.size());
  if (frames == 0) return {};
  const std::vector<double> win = HannWindow(window);
  const size_t len = static_cast<size_t>(frames - 1) * hop + window;
  std::vector<double> out(len, 0.0), norm(len, 0.0), buf(n_fft);
  RealFft fft(n_fft);
  for (int t = 0; t < frames; ++t) {
    fft.Inverse(spec[t].data(), buf.data());
    for (int i = 0; i < window; ++i) {
      out[t * hop + i] += buf[i] * win[i];
      norm[t * hop + i] += win[i] * win[i];
    }
  }
  // Near the ends the squared-window sum tends to 0; clamping it keeps
  // frames that are not a consistent STFT (Griffin-Lim iterates) from
  // blowing up there.  The interior, where the sum is constant, is exact.
  double peak = 0.0;
  for (double v : norm) peak = std::max(peak, v);
  const double floor = 0.1 * peak;
  for (size_t i = 0; i < len; ++i) out[i] /= std::max(norm[i], floor);
  return out;
}

Matrix MelFilterbank(int n_mels, int n_fft, int sample_rate) {
  auto hz_to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto mel_to_hz = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  const int n_bins = n_fft / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_max * i / (n_mels + 1));
  Matrix fb = Matrix::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double w = std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid));
      if (w > 0.0) fb(m, k) = w;
    }
  }
  return fb;
}

SpectralPeak DominantFrequency(const std::vector<double> &x, int sample_rate) {
  int n = 1;
  while (n < static_cast<int>(x.size())) n <<= 1;
  std::vector<double> buf(n, 0.0);
  std::copy(x.begin(), x.end(), buf.begin());
  std::vector<Complex> spec(n / 2 + 1);
  RealFft fft(n);
  fft.Forward(buf.data(), spec.data());
  int best = 1;
  for (int k = 1; k <= n / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  const double bin = static_cast<double>(sample_rate) / n;
  return {best * bin, bin};
}

}  // namespace voclab
