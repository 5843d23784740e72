// voclab/spectral.h

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

#ifndef VOCLAB_SPECTRAL_H_
#define VOCLAB_SPECTRAL_H_

#include <complex>
#include <memory>
#include <vector>

#include "voclab/autograd.h"

namespace voclab {

using Complex = std::complex<double>;

// Real FFT of fixed size backed by FFTW (estimate-mode plans, so results do
// not depend on run-time measurement).
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int size() const { return n_; }
  // in: n real samples; out: n/2+1 bins.
  void Forward(const double *in, Complex *out);
  // in: n/2+1 bins; out: n samples, scaled by 1/n (true inverse).
  void Inverse(const Complex *in, double *out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> HannWindow(int length);

int NumFrames(size_t num_samples, int window, int hop);

// Frames x (n_fft/2+1) complex spectrum of Hann-windowed frames.
std::vector<std::vector<Complex>> Stft(const std::vector<double> &x,
                                       int window, int hop, int n_fft);

// Weighted overlap-add inverse of Stft(); output length is
// (frames-1)*hop + window.
std::vector<double> Istft(const std::vector<std::vector<Complex>> &spec,
                          int window, int hop, int n_fft);

// n_mels x (n_fft/2+1) triangular filters on the HTK mel scale spanning
// [0, sample_rate/2].
Matrix MelFilterbank(int n_mels, int n_fft, int sample_rate);

// Index of the largest |X(k)| of a zero-padded full-length DFT, with the
// bin width in Hz.  Excludes DC.
struct SpectralPeak {
  double freq_hz;
  double bin_hz;
};
SpectralPeak DominantFrequency(const std::vector<double> &x, int sample_rate);

}  // namespace voclab

#endif  // VOCLAB_SPECTRAL_H_
