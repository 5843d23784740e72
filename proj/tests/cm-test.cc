// tests/cm-test.cc
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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.h"
#include "test-util.h"
#include "voclab/cm.h"
#include "voclab/corpus.h"
#include "voclab/errors.h"

namespace voclab {
namespace {

using testing::CanonicalViews;
using testing::ReferenceContrastive;

FeatureSequence Seq(const Matrix &m) { return {"u", m}; }

TEST(BackendTest, HandComputedFixture) {
  BackendParams be = InitBackend(2, 1);
  auto &a = be.arrays;
  a["fc1.weight"] = (Matrix(2, 2) << 0.5, -1, 0.25, 0.5).finished();
  a["fc1.bias"] = (Matrix(1, 2) << 0.1, 0).finished();
  a["fc2.weight"] = (Matrix(2, 2) << 1, 2, -1, 0.5).finished();
  a["fc2.bias"] = (Matrix(1, 2) << 0, -0.3).finished();
  a["fc3.weight"] = (Matrix(2, 2) << 2, 0, 0, 10).finished();
  a["fc3.bias"] = (Matrix(1, 2) << -1, 0).finished();
  a["out.weight"] = (Matrix(2, 1) << 3, 1).finished();
  a["out.bias"] = (Matrix(1, 1) << 0.5).finished();
  // x = [1, -2]
  // fc1: [0.1, -2]    -> leaky [0.1, -0.2]
  // fc2: [0.3, -0.2]  -> leaky [0.3, -0.02]
  // fc3: [-0.4, -0.2] -> leaky [-0.04, -0.02]
  // out: -0.12 - 0.02 + 0.5 = 0.36
  Matrix x(1, 2);
  x << 1, -2;
  EXPECT_NEAR(BackendScore(be, Seq(x)), 0.36, 1e-15);
}

TEST(BackendTest, ZeroNetworkReturnsBias) {
  BackendParams be = InitBackend(4, 1);
  for (auto &[name, m] : be.arrays) m.setZero();
  be.arrays["out.bias"](0, 0) = -1.25;
  EXPECT_EQ(BackendScore(be, Seq(Matrix::Zero(7, 4))), -1.25);
}

TEST(BackendTest, FramePermutationInvariance) {
  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    int d = 1 + rng.UniformInt(8), n = 1 + rng.UniformInt(30);
    BackendParams be = InitBackend(d, trial);
    for (auto &[name, m] : be.arrays)
      m = testing::RandomMatrix(m.rows(), m.cols(), rng, rng.Uniform(0.1, 3.0));
    Matrix f = testing::RandomMatrix(n, d, rng, 2.0);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(perm);
    Matrix g(n, d);
    for (int i = 0; i < n; ++i) g.row(i) = f.row(perm[i]);
    double s = BackendScore(be, Seq(f));
    EXPECT_NEAR(s, BackendScore(be, Seq(g)), 1e-12 * std::max(1.0, std::abs(s)));
  }
}

TEST(BackendTest, DimensionMismatch) {
  EXPECT_THROW(BackendScore(InitBackend(4, 1), Seq(Matrix::Zero(3, 5))),
               InputError);
}

TEST(AugmentTest, DeterministicLengthPreservingAndClipped) {
  Waveform w;
  w.samples = testing::RandomWave(8000, 2);
  AugmentConfig cfg;
  Waveform a = Augment(w, cfg, 9), b = Augment(w, cfg, 9), c = Augment(w, cfg, 10);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.samples.size(), w.samples.size());
  for (double v : a.samples) EXPECT_LE(std::abs(v), 1.0);
}

TEST(AugmentTest, MeasuredSnrMatchesDrawn) {
  AugmentConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Waveform w;
    w.samples = testing::RandomWave(16000, seed + 100);
    for (auto &v : w.samples) v *= 0.3;  // keep clear of the clipping stage
    AugmentResult r = AugmentDetailed(w, cfg, seed);
    EXPECT_GE(r.snr_db, 10.0);
    EXPECT_LE(r.snr_db, 30.0);
    double ps = 0, pn = 0;
    for (size_t i = 0; i < w.samples.size(); ++i) {
      double clean = 0;
      for (size_t k = 0; k < r.taps.size() && k <= i; ++k)
        clean += r.taps[k] * w.samples[i - k];
      ps += clean * clean;
      double noise = r.output.samples[i] - clean;
      pn += noise * noise;
    }
    EXPECT_NEAR(10 * std::log10(ps / pn), r.snr_db, 1.0) << seed;
  }
}

TEST(CrossEntropyTest, Examples) {
  EXPECT_DOUBLE_EQ(CrossEntropyLoss(0.0, Label::kBonafide), std::log(2.0));
  EXPECT_DOUBLE_EQ(CrossEntropyLoss(0.0, Label::kSpoof), std::log(2.0));
  EXPECT_LT(CrossEntropyLoss(20.0, Label::kBonafide), 1e-8);
  EXPECT_NEAR(CrossEntropyLoss(-3.0, Label::kBonafide),
              std::log(1.0 + std::exp(3.0)), 1e-14);
  EXPECT_NEAR(CrossEntropyLoss(3.0, Label::kSpoof),
              std::log(1.0 + std::exp(3.0)), 1e-14);
  EXPECT_TRUE(std::isfinite(CrossEntropyLoss(-1000.0, Label::kBonafide)));
}

TEST(CrossEntropyTest, GraphMatchesScalarAndGradient) {
  for (double s : {-4.0, -0.5, 0.0, 1.5, 7.0}) {
    for (Label l : {Label::kBonafide, Label::kSpoof}) {
      ad::Tape tape;
      ad::Var v = tape.Parameter(Matrix::Constant(1, 1, s));
      ad::Var loss = CrossEntropyGraph(v, l);
      EXPECT_NEAR(loss.scalar(), CrossEntropyLoss(s, l), 1e-14);
      tape.Backward(loss);
      // d/ds: sigmoid(s) - y.
      double y = l == Label::kBonafide ? 1.0 : 0.0;
      EXPECT_NEAR(v.grad()(0, 0), 1.0 / (1.0 + std::exp(-s)) - y, 1e-12);
    }
  }
}

TEST(ContrastiveTest, IdenticalEmbeddingsGiveLn7) {
  std::vector<ViewEmbedding> v;
  RowVector e(3);
  e << 0.2, -1.0, 0.5;
  for (int u = 0; u < 2; ++u)
    for (ViewClass c : {ViewClass::kBona, ViewClass::kVoc})
      for (int k = 0; k < 2; ++k) v.push_back({e, "u" + std::to_string(u), c});
  EXPECT_NEAR(ContrastiveFeatureLoss(v), std::log(7.0), 1e-12);
  EXPECT_NEAR(ReferenceContrastive(v, 0.07), std::log(7.0), 1e-12);
}

TEST(ContrastiveTest, MatchesReferenceAndIsPermutationInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto v = CanonicalViews(1 + rng.UniformInt(4), 2 + rng.UniformInt(6), rng);
    double tau = trial % 2 ? 0.07 : 0.5;
    double loss = ContrastiveFeatureLoss(v, tau);
    EXPECT_NEAR(loss, ReferenceContrastive(v, tau), 1e-10);
    rng.Shuffle(v);
    EXPECT_NEAR(ContrastiveFeatureLoss(v, tau), loss, 1e-10);
  }
}

TEST(ContrastiveTest, MonotoneInPositiveSimilarity) {
  // Anchor and its positive live in the span of e0, e1; every other view
  // lives in e2..e7, so only s(anchor, positive) changes with theta.
  auto build = [](double theta) {
    std::vector<ViewEmbedding> v;
    auto unit = [](std::initializer_list<std::pair<int, double>> c) {
      RowVector r = RowVector::Zero(8);
      for (auto [i, x] : c) r(i) = x;
      return r;
    };
    v.push_back({unit({{0, 1.0}}), "u0", ViewClass::kBona});
    v.push_back({unit({{0, std::cos(theta)}, {1, std::sin(theta)}}), "u0",
                 ViewClass::kBona});
    v.push_back({unit({{2, 1.0}}), "u0", ViewClass::kVoc});
    v.push_back({unit({{2, 0.6}, {3, 0.8}}), "u0", ViewClass::kVoc});
    v.push_back({unit({{4, 1.0}}), "u1", ViewClass::kBona});
    v.push_back({unit({{4, 0.8}, {5, 0.6}}), "u1", ViewClass::kBona});
    v.push_back({unit({{6, 1.0}}), "u1", ViewClass::kVoc});
    v.push_back({unit({{6, 0.3}, {7, std::sqrt(0.91)}}), "u1", ViewClass::kVoc});
    return v;
  };
  double prev = ContrastiveFeatureLoss(build(1.5));
  for (double theta = 1.4; theta >= 0.0; theta -= 0.1) {
    double cur = ContrastiveFeatureLoss(build(theta));
    EXPECT_LT(cur, prev) << theta;
    prev = cur;
  }
}

TEST(ContrastiveTest, CanonicalViewsHaveExactlyOnePositive) {
  Rng rng(6);
  auto v = CanonicalViews(3, 4, rng);
  for (size_t a = 0; a < v.size(); ++a) {
    int pos = 0;
    for (size_t p = 0; p < v.size(); ++p)
      pos += p != a && v[p].utt == v[a].utt && v[p].view_class == v[a].view_class;
    EXPECT_EQ(pos, 1);
  }
}

TEST(ContrastiveTest, ErrorsAndGraphGradient) {
  Rng rng(7);
  auto v = CanonicalViews(2, 5, rng);
  std::vector<ViewEmbedding> lonely(v.begin(), v.begin() + 3);
  EXPECT_THROW(ContrastiveFeatureLoss(lonely), InputError);
  EXPECT_THROW(ContrastiveFeatureLoss({v[0]}), InputError);

  std::vector<ViewTag> tags;
  Matrix emb(v.size(), 5);
  for (size_t i = 0; i < v.size(); ++i) {
    emb.row(i) = v[i].embedding;
    tags.push_back({v[i].utt, v[i].view_class});
  }
  ad::Tape tape;
  EXPECT_NEAR(ContrastiveLossGraph(tape.Constant(emb), tags).scalar(),
              ContrastiveFeatureLoss(v), 1e-12);
  // Graph gradient against differences of the straight-line reference.
  auto r = testing::CheckContrastiveGradient(v);
  EXPECT_LT(r.max_rel_err, 1e-4) << r.worst;
}

TEST(TotalLossTest, Examples) {
  TrainConfig cfg;
  EXPECT_NEAR(TotalLoss(0.2, 0.5, 0.01, cfg), 1.7, 1e-15);
  cfg.lambda_dis = 0;
  EXPECT_EQ(TotalLoss(0.2, 0.5, 0.01, cfg), 0.2 + 0.5);
  EXPECT_EQ(TotalLoss(0, 0, 0, TrainConfig()), 0.0);
}

TEST(TotalLossTest, MonotoneInEachComponent) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    TrainConfig cfg;
    cfg.lambda_cf = rng.Uniform(0, 5);
    cfg.lambda_dis = rng.Uniform(0, 200);
    double c[3] = {rng.Uniform(0, 2), rng.Uniform(0, 2), rng.Uniform(0, 2)};
    double base = TotalLoss(c[0], c[1], c[2], cfg);
    for (int k = 0; k < 3; ++k) {
      double d[3] = {c[0], c[1], c[2]};
      d[k] += rng.Uniform(0, 1);
      EXPECT_GE(TotalLoss(d[0], d[1], d[2], cfg), base);
    }
  }
}

TEST(ScheduleTest, StepDecay) {
  TrainConfig cfg;
  EXPECT_EQ(LearningRate(cfg, 0), cfg.lr0);
  EXPECT_NEAR(LearningRate(cfg, 9), cfg.lr0, 0.0);
  EXPECT_NEAR(LearningRate(cfg, 10), cfg.lr0 / 10, 1e-20);
  EXPECT_NEAR(LearningRate(cfg, 25), cfg.lr0 / 100, 1e-20);
  EXPECT_EQ(TrainConfig::PaperRecipe().lr0, 5e-6);
  EXPECT_EQ(TrainConfig::PaperRecipe().patience, 10);
}

TEST(EarlyStopperTest, StopsAtPatienceWhenNeverImproving) {
  for (int patience : {1, 3, 10}) {
    EarlyStopper s(patience);
    int stopped = -1;
    for (int epoch = 0; epoch < 100; ++epoch) {
      if (s.Update(epoch, 1.0 + epoch)) {
        stopped = epoch;
        break;
      }
    }
    EXPECT_EQ(stopped, patience);
    EXPECT_EQ(s.best_epoch(), 0);
  }
  EarlyStopper s(2);
  EXPECT_FALSE(s.Update(0, 5.0));
  EXPECT_FALSE(s.Update(1, 4.0));
  EXPECT_FALSE(s.Update(2, 4.5));
  EXPECT_TRUE(s.Update(3, 4.0));  // equal is not an improvement
  EXPECT_EQ(s.best_epoch(), 1);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  c.patience = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig();
  c.lr0 = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

// ---- models on a tiny encoder -------------------------------------------

EncoderParams Tiny(uint64_t seed) {
  return InitEncoder(testing::TinyEncoderConfig(), seed);
}

Waveform Wave(size_t n, uint64_t seed, const std::string &id = "w") {
  Waveform w;
  w.id = id;
  w.samples = testing::RandomWave(n, seed);
  return w;
}

TEST(CmScoreTest, Compositions) {
  Waveform w = Wave(6400, 1);
  CMModel single = MakeSingleCm(Tiny(1), 3);
  EXPECT_EQ(CmScore(single, w),
            BackendScore(single.backend, Encode(single.encoder, w)));

  CMModel same = MakeDualDiffCm(Tiny(1), Tiny(1), 3);
  EXPECT_TRUE(CmFeatures(same, w).values.isZero(0));
  EXPECT_EQ(CmScore(same, w), BackendScore(same.backend, Seq(Matrix::Zero(20, 8))));

  CMModel dual = MakeDualDiffCm(Tiny(1), Tiny(2), 3);
  EXPECT_EQ(CmFeatures(dual, w).values,
            Encode(dual.encoder, w).values - Encode(*dual.encoder_b, w).values);

  CMModel dist = MakeDistilledCm(DistillConfig(), Tiny(1), Tiny(2), 3);
  EXPECT_EQ(CmScore(dist, w), BackendScore(dist.backend, Encode(Tiny(1), w)));
}

TEST(CmModelTest, DualDiffNeedsMatchingDim) {
  EncoderConfig c = testing::TinyEncoderConfig();
  c.dim = 4;
  EXPECT_ANY_THROW(MakeDualDiffCm(Tiny(1), InitEncoder(c, 1), 1));
}

TEST(CmModelTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  DistillConfig dc;
  dc.target = DistillTargetKind::kHidden;
  dc.lambda_dis = 10;
  for (const CMModel &m : {MakeSingleCm(Tiny(1), 1), MakeDualDiffCm(Tiny(1), Tiny(2), 1),
                           MakeDistilledCm(dc, Tiny(1), Tiny(2), 1)}) {
    SaveCm(dir / "m.ckpt", m);
    CMModel r = LoadCm(dir / "m.ckpt");
    EXPECT_EQ(r.mode, m.mode);
    EXPECT_EQ(r.encoder.arrays, m.encoder.arrays);
    EXPECT_EQ(r.backend.arrays, m.backend.arrays);
    EXPECT_EQ(r.encoder_b.has_value(), m.encoder_b.has_value());
    if (m.mode == CmMode::kDistilled) {
      EXPECT_EQ(r.distill.target, DistillTargetKind::kHidden);
      EXPECT_EQ(r.distill.lambda_dis, 10);
    }
    Waveform w = Wave(3200, 2);
    EXPECT_EQ(CmScore(r, w), CmScore(m, w));
  }
}

void CheckModeGradient(const CMModel &model, const TrainConfig &cfg) {
  ASSERT_GT(testing::BackendKinkMargin(model, testing::GradMicroBatch()), 1e-3)
      << "instance sits on a kink";
  auto r = testing::CheckModeGradient(model, cfg);
  EXPECT_LT(r.total_mismatch, 1e-12);
  EXPECT_GT(r.parts.cf, 0.0);
  if (model.mode == CmMode::kDistilled) EXPECT_GT(r.parts.dis, 0.0);
  EXPECT_LT(r.grad.max_rel_err, 1e-4) << CmModeName(model.mode) << ": " << r.grad.worst;
  EXPECT_GT(r.grad.checked, 1000);
}

TEST(BatchLossTest, GradientSingle) {
  CheckModeGradient(testing::AwayFromKinks([](uint64_t s) {
                      return MakeSingleCm(Tiny(1), s);
                    }),
                    TrainConfig());
}

TEST(BatchLossTest, GradientDualDiff) {
  CheckModeGradient(testing::AwayFromKinks([](uint64_t s) {
                      return MakeDualDiffCm(Tiny(1), Tiny(2), s);
                    }),
                    TrainConfig());
}

TEST(BatchLossTest, GradientDistilled) {
  CheckModeGradient(testing::AwayFromKinks([](uint64_t s) {
                      return testing::PerturbedStudent(DistillConfig(), s);
                    }),
                    TrainConfig());
  DistillConfig hidden;
  hidden.target = DistillTargetKind::kHidden;
  CheckModeGradient(testing::AwayFromKinks([&](uint64_t s) {
                      return testing::PerturbedStudent(hidden, s);
                    }),
                    TrainConfig());
}

// ---- fine-tuning on a tiny on-disk corpus --------------------------------

struct TinyData {
  testing::TempDir dir;
  Manifest train_bona, train_spoof, dev;
  TinyData() {
    CorpusConfig c;
    c.n_utts = 10;
    c.seed = 3;
    c.dev_fraction = 0.2;
    c.test_fraction = 0.0;
    auto out = BuildCorpus(c, {"griffin", "harmnoise"}, dir.path(),
                           VocoderAssignment::kAlternate);
    train_bona = out.bonafide.Subset("train");
    train_spoof = out.vocoded.Subset("train");
    dev = Concat({out.bonafide.Subset("dev"), out.vocoded.Subset("dev")});
  }
};

TrainConfig FastConfig() {
  TrainConfig c;
  c.max_epochs = 2;
  c.batch_size = 2;
  c.lr0 = 1e-3;
  c.seed = 4;
  return c;
}

TEST(FinetuneTest, DeterministicAndReportsEpochs) {
  TinyData data;
  CMModel m = MakeSingleCm(Tiny(1), 2);
  auto a = Finetune(m, data.train_bona, data.train_spoof, FastConfig(), data.dev);
  auto b = Finetune(m, data.train_bona, data.train_spoof, FastConfig(), data.dev);
  SaveCm(data.dir / "a.ckpt", a.model);
  SaveCm(data.dir / "b.ckpt", b.model);
  EXPECT_EQ(testing::ReadFileBytes(data.dir / "a.ckpt"),
            testing::ReadFileBytes(data.dir / "b.ckpt"));
  ASSERT_EQ(a.report.epochs.size(), 2u);
  for (const auto &e : a.report.epochs) {
    EXPECT_TRUE(std::isfinite(e.train_loss));
    EXPECT_TRUE(std::isfinite(e.dev_loss));
    EXPECT_GT(e.cf, 0.0);
  }
  EXPECT_NE(a.model.encoder.arrays, m.encoder.arrays);
  for (const auto &e : data.dev.entries)
    EXPECT_TRUE(std::isfinite(CmScore(a.model, data.dev.Load(e))));
}

TEST(FinetuneTest, FrozenComponentsUnchanged) {
  TinyData data;
  CMModel dual = MakeDualDiffCm(Tiny(1), Tiny(2), 2);
  auto r = Finetune(dual, data.train_bona, data.train_spoof, FastConfig(), data.dev);
  EXPECT_EQ(r.model.encoder_b->arrays, dual.encoder_b->arrays);

  CMModel dist = MakeDistilledCm(DistillConfig(), Tiny(1), Tiny(2), 2);
  auto d = Finetune(dist, data.train_bona, data.train_spoof, FastConfig(), data.dev);
  EXPECT_EQ(d.model.teacher_a->arrays, dist.teacher_a->arrays);
  EXPECT_EQ(d.model.teacher_b->arrays, dist.teacher_b->arrays);
  EXPECT_GT(d.report.epochs[0].dis, 0.0);
}

TEST(FinetuneTest, Errors) {
  TinyData data;
  CMModel m = MakeSingleCm(Tiny(1), 2);
  EXPECT_THROW(Finetune(m, data.train_bona, data.train_spoof, FastConfig(), Manifest()),
               ConfigError);
  EXPECT_THROW(Finetune(m, data.train_bona, data.train_spoof, FastConfig(),
                        data.train_bona),
               ConfigError);
  CMModel bad = m;
  bad.backend.arrays["out.bias"](0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Finetune(bad, data.train_bona, data.train_spoof, FastConfig(), data.dev),
               NumericError);
}

}  // namespace
}  // namespace voclab
