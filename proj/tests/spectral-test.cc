// tests/spectral-test.cc
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

#include <gtest/gtest.h>

#include "test-util.h"
#include "voclab/spectral.h"

namespace voclab {
namespace {

TEST(SpectralTest, FftMatchesDirectDft) {
  const int n = 24;
  Rng rng(3);
  std::vector<double> x(n);
  for (auto &v : x) v = rng.Normal();
  RealFft fft(n);
  std::vector<Complex> X(n / 2 + 1);
  fft.Forward(x.data(), X.data());
  for (int k = 0; k <= n / 2; ++k) {
    Complex ref(0, 0);
    for (int t = 0; t < n; ++t)
      ref += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
    EXPECT_NEAR(std::abs(X[k] - ref), 0.0, 1e-10) << k;
  }
  std::vector<double> back(n);
  fft.Inverse(X.data(), back.data());
  for (int t = 0; t < n; ++t) EXPECT_NEAR(back[t], x[t], 1e-12);
}

TEST(SpectralTest, StftRoundTrip) {
  auto x = testing::RandomWave(4000, 5);
  auto spec = Stft(x, 400, 160, 512);
  ASSERT_EQ(static_cast<int>(spec.size()), NumFrames(x.size(), 400, 160));
  auto y = Istft(spec, 400, 160, 512);
  ASSERT_EQ(y.size(), (spec.size() - 1) * 160 + 400);
  // Away from the edges the weighted overlap-add is exact.
  for (size_t i = 400; i + 400 < y.size(); ++i)
    EXPECT_NEAR(y[i], x[i], 1e-9) << i;
}

TEST(SpectralTest, DominantFrequencyOfSine) {
  auto x = testing::Sine(440.0, 0.5, 16000);
  SpectralPeak p = DominantFrequency(x, kSampleRate);
  EXPECT_NEAR(p.freq_hz, 440.0, p.bin_hz);
}

TEST(SpectralTest, MelFilterbankShapeAndCoverage) {
  Matrix fb = MelFilterbank(80, 512, kSampleRate);
  ASSERT_EQ(fb.rows(), 80);
  ASSERT_EQ(fb.cols(), 257);
  EXPECT_GE(fb.minCoeff(), 0.0);
  for (int m = 0; m < 80; ++m) EXPECT_GT(fb.row(m).sum(), 0.0) << m;
}

}  // namespace
}  // namespace voclab
