// tests/ssl-test.cc
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

#include "oracles.h"
#include "test-util.h"
#include "voclab/acoustic-features.h"
#include "voclab/errors.h"
#include "voclab/params.h"
#include "voclab/ssl-encoder.h"
#include "voclab/ssl-train.h"
#include "voclab/vocoder.h"
#include "voclab/waveform-synth.h"

namespace voclab {
namespace {

Waveform Wave(size_t n, uint64_t seed) {
  Waveform w;
  w.id = "w" + std::to_string(seed);
  w.samples = testing::RandomWave(n, seed);
  return w;
}

TEST(EncoderTest, ShapeAndDeterminism) {
  EncoderParams p = InitEncoder(EncoderConfig(), 1);
  Waveform w = Wave(16000, 2);
  FeatureSequence a = Encode(p, w), b = Encode(p, w);
  EXPECT_EQ(a.values.rows(), 50);
  EXPECT_EQ(a.values.cols(), 64);
  EXPECT_EQ(a.values, b.values);
}

TEST(EncoderTest, FrameCountDependsOnLengthOnly) {
  EncoderConfig cfg = testing::TinyEncoderConfig();
  for (size_t n : {400u, 639u, 640u, 1000u, 3333u, 16000u}) {
    EXPECT_EQ(EncoderFrames(cfg, n), static_cast<int>(n / 320)) << n;
    for (uint64_t seed : {1u, 2u}) {
      EncoderParams p = InitEncoder(cfg, seed);
      EXPECT_EQ(Encode(p, Wave(n, 3)).values.rows(),
                std::max<long>(1, static_cast<long>(n / 320)))
          << n;
    }
  }
}

TEST(EncoderTest, TooShortNamesMinimum) {
  EncoderParams p = InitEncoder(testing::TinyEncoderConfig(), 1);
  try {
    Encode(p, Wave(399, 1));
    FAIL();
  } catch (const InputError &e) {
    EXPECT_NE(std::string(e.what()).find("400"), std::string::npos);
  }
}

TEST(EncoderTest, FinalNormStatistics) {
  EncoderParams p = InitEncoder(EncoderConfig(), 4);
  p.arrays["final_norm.scale"].setOnes();
  p.arrays["final_norm.offset"].setZero();
  Matrix y = Encode(p, Wave(16000, 5)).values;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    double mean = y.row(i).mean();
    double var = (y.row(i).array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-5);
    EXPECT_NEAR(var, 1.0, 1e-4);
  }
}

TEST(EncoderTest, HiddenOutputs) {
  EncoderParams p = InitEncoder(EncoderConfig(), 6);
  // Non-trivial final affine so that the composition check means something.
  Rng rng(1);
  p.arrays["final_norm.scale"] = testing::RandomMatrix(1, 64, rng);
  p.arrays["final_norm.offset"] = testing::RandomMatrix(1, 64, rng);
  Waveform w = Wave(12000, 7);
  auto hidden = EncodeHidden(p, w);
  ASSERT_EQ(hidden.size(), 2u);
  Matrix out = Encode(p, w).values;
  for (const auto &h : hidden) {
    EXPECT_EQ(h.values.rows(), out.rows());
    EXPECT_EQ(h.values.cols(), out.cols());
  }
  EXPECT_LE((ApplyFinalNorm(p, hidden.back().values) - out).cwiseAbs().maxCoeff(),
            1e-6);
}

TEST(EncoderTest, FiniteForRandomParams) {
  EncoderConfig cfg = testing::TinyEncoderConfig();
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    EncoderParams p = InitEncoder(cfg, trial);
    double scale = trial < 5 ? 1.0 : 10.0;
    for (auto &[name, m] : p.arrays)
      m = testing::RandomMatrix(m.rows(), m.cols(), rng, scale);
    Waveform w = Wave(400 + rng.UniformInt(8000), trial);
    Matrix y = Encode(p, w).values;
    EXPECT_TRUE(y.allFinite()) << trial;
  }
}

TEST(EncoderTest, CheckpointRoundTrip) {
  testing::TempDir dir;
  EncoderParams p = InitEncoder(EncoderConfig(), 3);
  p.stage = "pretrain";
  SaveEncoder(dir / "e.ckpt", p);
  EncoderParams q = LoadEncoder(dir / "e.ckpt");
  EXPECT_TRUE(q.config == p.config);
  EXPECT_EQ(q.stage, "pretrain");
  ASSERT_EQ(q.arrays.size(), p.arrays.size());
  for (const auto &[name, m] : p.arrays) EXPECT_EQ(q.arrays.at(name), m) << name;
  SaveEncoder(dir / "f.ckpt", q);
  EXPECT_EQ(testing::ReadFileBytes(dir / "e.ckpt"),
            testing::ReadFileBytes(dir / "f.ckpt"));
}

TEST(EncoderTest, ValidateRejectsBadShapes) {
  EncoderParams p = InitEncoder(testing::TinyEncoderConfig(), 3);
  EXPECT_NO_THROW(ValidateEncoderParams(p));
  p.arrays["proj.weight"].resize(2, 2);
  EXPECT_ANY_THROW(ValidateEncoderParams(p));
}

TEST(SpanMaskTest, DeterministicAndCovered) {
  MaskConfig mc;
  for (int n : {10, 50, 137}) {
    auto a = SpanMask(n, mc, 4), b = SpanMask(n, mc, 4);
    EXPECT_EQ(a, b);
    int masked = 0;
    for (bool m : a) masked += m;
    int spans = static_cast<int>(std::lround(0.5 * n / 5));
    EXPECT_GE(masked, 5);
    EXPECT_LE(masked, spans * 5);
  }
  EXPECT_THROW(SpanMask(4, mc, 1), InputError);
}

// A parameter set whose transformer is the identity and whose conv features
// are one fixed, already normalised row equal to the mask embedding: every
// masked prediction reproduces its target.
TEST(SslLossTest, ExactPredictionGivesZero) {
  EncoderConfig cfg = testing::TinyEncoderConfig();
  EncoderParams p = InitEncoder(cfg, 1);
  RowVector c(cfg.dim);
  for (int d = 0; d < cfg.dim; ++d) c(d) = d % 2 ? -1.0 : 1.0;
  for (auto &[name, m] : p.arrays) {
    if (name.rfind("conv.", 0) == 0 || name == "proj.weight" ||
        name.rfind("pos.", 0) == 0 || name.find("attn.wo") != std::string::npos ||
        name.find("attn.bo") != std::string::npos ||
        name.find("ffn.w2") != std::string::npos ||
        name.find("ffn.b2") != std::string::npos)
      m.setZero();
  }
  p.arrays["proj.bias"] = c;
  p.arrays["mask_embedding"] = c;
  p.arrays["final_norm.scale"].setConstant(std::sqrt(1.0 + cfg.ln_eps));
  p.arrays["final_norm.offset"].setZero();
  double loss = SslPretrainLoss(p, Wave(6400, 2), MaskConfig(), 3);
  EXPECT_NEAR(loss, 0.0, 1e-14);
}

// Straight-line evaluation: the masked output comes from one pass, the
// target from an independent unmasked pass, and the mean is written out
// as explicit loops.
TEST(SslLossTest, MatchesReferenceEvaluator) {
  EncoderConfig cfg;
  cfg.dim = 4;
  cfg.heads = 2;
  cfg.ffn_dim = 16;
  cfg.conv_channels = 4;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    EncoderParams p = InitEncoder(cfg, seed);
    Waveform w = Wave(3200, seed + 10);
    MaskConfig mc;
    auto mask = SpanMask(10, mc, seed);
    ASSERT_EQ(EncoderFrames(cfg, w.samples.size()), 10);

    ad::Tape t1;
    BoundParams b1(t1, p.arrays, false);
    Matrix out = EncoderForward(cfg, b1, w.samples, &mask).output.value();
    ad::Tape t2;
    BoundParams b2(t2, p.arrays, false);
    Matrix target = EncoderForward(cfg, b2, w.samples).conv_features.value();

    double sum = 0;
    int count = 0;
    for (int i = 0; i < 10; ++i) {
      if (!mask[i]) continue;
      for (int d = 0; d < 4; ++d) {
        sum += std::abs(out(i, d) - target(i, d));
        ++count;
      }
    }
    double ref = sum / count;
    double got = SslPretrainLoss(p, w, mc, seed);
    EXPECT_NEAR(got, ref, 1e-12) << seed;
    EXPECT_EQ(got, SslPretrainLoss(p, w, mc, seed));
  }
}

TEST(SslLossTest, GradientMatchesFiniteDifferences) {
  for (uint64_t seed : {1u, 2u}) {
    auto r = testing::CheckSslGradient(seed);
    EXPECT_LT(r.max_rel_err, 1e-4) << r.worst;
  }
}

std::vector<Waveform> ToyUtterances(int n, uint64_t seed) {
  CorpusConfig c;
  c.n_utts = n;
  c.seed = seed;
  return SynthBonafide(c);
}

TEST(PretrainTest, LossDecreases) {
  auto data = ToyUtterances(50, 3);
  SslTrainConfig tc;
  tc.epochs = 20;
  auto r = TrainSsl(InitEncoder(EncoderConfig(), 1), data, tc, 1, "pretrain");
  ASSERT_EQ(r.log.size(), 20u);
  EXPECT_LT(r.log.back().mean_loss, r.log.front().mean_loss);
  for (double l : r.step_losses) EXPECT_TRUE(std::isfinite(l));
  EXPECT_EQ(r.params.stage, "pretrain");
}

TEST(PretrainTest, IdenticalSeedsGiveIdenticalCheckpoints) {
  testing::TempDir dir;
  auto data = ToyUtterances(4, 5);
  SslTrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 2;
  EncoderConfig cfg = testing::TinyEncoderConfig();
  auto a = TrainSsl(InitEncoder(cfg, 2), data, tc, 8, "pretrain");
  auto b = TrainSsl(InitEncoder(cfg, 2), data, tc, 8, "pretrain");
  SaveEncoder(dir / "a.ckpt", a.params);
  SaveEncoder(dir / "b.ckpt", b.params);
  EXPECT_EQ(testing::ReadFileBytes(dir / "a.ckpt"),
            testing::ReadFileBytes(dir / "b.ckpt"));
  EXPECT_EQ(a.step_losses, b.step_losses);
}

TEST(PretrainTest, EmptyDataIsConfigError) {
  EXPECT_THROW(TrainSsl(InitEncoder(testing::TinyEncoderConfig(), 1), {},
                        SslTrainConfig(), 1, "pretrain"),
               ConfigError);
}

TEST(PretrainTest, NonFiniteLossAborts) {
  EncoderParams p = InitEncoder(testing::TinyEncoderConfig(), 1);
  p.arrays["proj.bias"](0, 0) = std::numeric_limits<double>::quiet_NaN();
  SslTrainConfig tc;
  tc.epochs = 1;
  EXPECT_THROW(TrainSsl(p, ToyUtterances(2, 1), tc, 1, "pretrain"),
               NumericError);
}

TEST(ContinualTest, ZeroEpochsIsIdentity) {
  EncoderParams p = InitEncoder(testing::TinyEncoderConfig(), 4);
  p.stage = "pretrain";
  SslTrainConfig tc;
  tc.epochs = 0;
  auto r = TrainSsl(p, ToyUtterances(2, 1), tc, 1, "continual");
  for (const auto &[name, m] : p.arrays)
    EXPECT_EQ(r.params.arrays.at(name), m) << name;
}

TEST(ContinualTest, LowersHeldOutVocodedLoss) {
  auto bona = ToyUtterances(30, 41);
  SslTrainConfig tc;
  tc.epochs = 5;
  auto pre = TrainSsl(InitEncoder(EncoderConfig(), 1), bona, tc, 2, "pretrain");
  FeatureConfig fc;
  fc.with_f0 = true;
  std::vector<Waveform> train, heldout;
  for (size_t i = 0; i < bona.size(); ++i) {
    auto f = ExtractFeatures(bona[i], fc);
    for (const char *v : {"griffin", "harmnoise"})
      (i < 20 ? train : heldout).push_back(Vocode(f, v, i));
  }
  SslTrainConfig ct;
  ct.epochs = 3;
  ct.lr = 1e-4;
  auto a = TrainSsl(pre.params, train, ct, 3, "continual");
  auto b = TrainSsl(pre.params, train, ct, 3, "continual");
  EXPECT_EQ(a.step_losses, b.step_losses);
  double before = MeanSslLoss(pre.params, heldout, ct.mask, 13);
  double after = MeanSslLoss(a.params, heldout, ct.mask, 13);
  EXPECT_LT(after, before);
}

}  // namespace
}  // namespace voclab
