// tests/eval-test.cc
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
#include <filesystem>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "test-util.h"
#include "voclab/corpus.h"
#include "voclab/errors.h"
#include "voclab/eval.h"
#include "oracles.h"

namespace voclab {
namespace {

using testing::BruteForceEer;

std::vector<ScoreRecord> Records(const std::vector<double> &bona,
                                 const std::vector<double> &spoof,
                                 const std::string &set = "s") {
  std::vector<ScoreRecord> r;
  int i = 0;
  for (double s : bona) r.push_back({"b" + std::to_string(i++), set, Label::kBonafide, s});
  for (double s : spoof) r.push_back({"s" + std::to_string(i++), set, Label::kSpoof, s});
  return r;
}

std::vector<double> RandomScores(Rng &rng, int n, bool ties) {
  std::vector<double> v(n);
  for (auto &x : v)
    x = ties ? std::round(rng.Uniform(0, 8)) / 2.0 : rng.Normal();
  return v;
}

TEST(EerTest, Examples) {
  EXPECT_EQ(ComputeEer({0.9, 0.8}, {0.1, 0.2}).eer, 0.0);
  EXPECT_NEAR(ComputeEer({0.8, 0.6, 0.4}, {0.7, 0.5, 0.3}).eer, 1.0 / 3, 1e-12);
  EXPECT_NEAR(BruteForceEer({0.8, 0.6, 0.4}, {0.7, 0.5, 0.3}), 1.0 / 3, 1e-12);
  EerResult r = ComputeEer(Records({0.9, 0.8}, {0.1, 0.2}));
  EXPECT_EQ(r.n_bona, 2);
  EXPECT_EQ(r.n_spoof, 2);
}

TEST(EerTest, Errors) {
  EXPECT_THROW(ComputeEer({0.1, 0.2}, {}), InputError);
  EXPECT_THROW(ComputeEer({}, {0.3}), InputError);
  EXPECT_THROW(ComputeEer({std::nan("")}, {0.3}), InputError);
}

TEST(EerTest, AgreesWithBruteForce) {
  Rng rng(1);
  for (int trial = 0; trial < 400; ++trial) {
    bool ties = trial % 2 == 0;
    auto b = RandomScores(rng, 1 + rng.UniformInt(50), ties);
    auto s = RandomScores(rng, 1 + rng.UniformInt(50), ties);
    if (!ties)
      for (auto &x : s) x -= 1.0;
    double eer = ComputeEer(b, s).eer;
    EXPECT_NEAR(eer, BruteForceEer(b, s), 1e-9) << trial;
    EXPECT_GE(eer, 0.0);
    EXPECT_LE(eer, 1.0);
    double min_b = *std::min_element(b.begin(), b.end());
    double max_s = *std::max_element(s.begin(), s.end());
    EXPECT_EQ(eer == 0.0, min_b > max_s) << trial;
  }
}

TEST(EerTest, RankInvariance) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto b = RandomScores(rng, 2 + rng.UniformInt(40), trial % 3 == 0);
    auto s = RandomScores(rng, 2 + rng.UniformInt(40), trial % 3 == 0);
    double a = rng.Uniform(0.1, 3), c = rng.Uniform(-5, 5);
    int kind = trial % 3;
    auto f = [&](double x) {
      if (kind == 0) return a * x + c;
      if (kind == 1) return std::exp(x / 4) * a;
      return std::atan(x) + x * x * x;
    };
    std::vector<double> tb, ts;
    for (double x : b) tb.push_back(f(x));
    for (double x : s) ts.push_back(f(x));
    EXPECT_EQ(ComputeEer(b, s).eer, ComputeEer(tb, ts).eer) << trial;
  }
}

TEST(EerTest, NegateAndSwapSymmetry) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto b = RandomScores(rng, 1 + rng.UniformInt(40), trial % 2 == 0);
    auto s = RandomScores(rng, 1 + rng.UniformInt(40), trial % 2 == 0);
    std::vector<double> nb, ns;
    for (double x : s) nb.push_back(-x);
    for (double x : b) ns.push_back(-x);
    EXPECT_NEAR(ComputeEer(b, s).eer, ComputeEer(nb, ns).eer, 1e-12) << trial;
  }
}

TEST(PooledEerTest, MisalignedSets) {
  auto a = Records({0.9, 0.8}, {0.6, 0.5}, "A");
  auto b = Records({0.4, 0.3}, {0.1, 0.0}, "B");
  EXPECT_EQ(ComputeEer(a).eer, 0.0);
  EXPECT_EQ(ComputeEer(b).eer, 0.0);
  EXPECT_EQ(PooledEer({a, b}).eer, 0.5);
  EXPECT_EQ(PooledEer({b, a}).eer, 0.5);
  EXPECT_EQ(PooledEer({a}).eer, ComputeEer(a).eer);
}

TEST(PooledEerTest, EqualsConcatenationForAnyPartition) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto all = Records(RandomScores(rng, 20, trial % 2), RandomScores(rng, 20, trial % 2));
    rng.Shuffle(all);
    std::vector<std::vector<ScoreRecord>> parts(1 + rng.UniformInt(4));
    for (const auto &r : all) parts[rng.UniformInt(parts.size())].push_back(r);
    EerResult p = PooledEer(parts), c = ComputeEer(all);
    EXPECT_EQ(p.eer, c.eer);
    EXPECT_EQ(p.threshold, c.threshold);
  }
}

TEST(EerTableTest, PerSetThenPooled) {
  auto recs = Records({0.9, 0.8}, {0.6, 0.5}, "A");
  auto b = Records({0.4, 0.3}, {0.1, 0.0}, "B");
  recs.insert(recs.end(), b.begin(), b.end());
  auto rows = EerTable(recs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].set_name, "A");
  EXPECT_EQ(rows[1].set_name, "B");
  EXPECT_EQ(rows[2].set_name, kPooledSetName);
  EXPECT_EQ(rows[2].result.eer, 0.5);
  std::string text = FormatEerReport(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), "set\teer_pct\tthreshold\tn_bona\tn_spoof");
  EXPECT_NE(text.find("Pooled\t50.00\t"), std::string::npos) << text;
}

TEST(ScoreFileTest, LosslessRoundTrip) {
  testing::TempDir dir;
  Rng rng(5);
  std::vector<ScoreRecord> recs;
  for (int i = 0; i < 50; ++i)
    recs.push_back({"u" + std::to_string(i), i % 2 ? "test-main" : "test-wild",
                    i % 3 ? Label::kSpoof : Label::kBonafide,
                    rng.Normal() * std::pow(10.0, rng.Uniform(-8, 8))});
  WriteScores(dir / "s.tsv", recs);
  auto back = ReadScores(dir / "s.tsv");
  ASSERT_EQ(back.size(), recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].id, recs[i].id);
    EXPECT_EQ(back[i].set_name, recs[i].set_name);
    EXPECT_EQ(back[i].label, recs[i].label);
    EXPECT_EQ(back[i].score, recs[i].score);
  }
}

TEST(ScoreDatasetTest, OrderLabelsDeterminismAndErrors) {
  testing::TempDir dir;
  CorpusConfig c;
  c.n_utts = 5;
  c.seed = 2;
  auto out = BuildCorpus(c, {"griffin"}, dir.path());
  Manifest m = Concat({out.bonafide, out.vocoded});
  ASSERT_EQ(m.size(), 10u);
  CMModel model = MakeSingleCm(InitEncoder(testing::TinyEncoderConfig(), 1), 1);
  auto a = ScoreDataset(model, m, "test-x"), b = ScoreDataset(model, m, "test-x");
  ASSERT_EQ(a.size(), 10u);
  for (size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a[i].id, m.entries[i].id);
    EXPECT_EQ(a[i].label, m.entries[i].label);
    EXPECT_EQ(a[i].set_name, "test-x");
    EXPECT_EQ(a[i].score, b[i].score);
  }
  std::filesystem::remove(m.Resolve(m.entries[2]));
  std::filesystem::remove(m.Resolve(m.entries[7]));
  try {
    ScoreDataset(model, m, "test-x");
    FAIL();
  } catch (const IoError &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find(m.entries[2].id), std::string::npos) << msg;
    EXPECT_NE(msg.find(m.entries[7].id), std::string::npos) << msg;
  }
}

TEST(MultiRoundTest, MeanAndSchema) {
  auto round = [](int, uint64_t seed) {
    Rng rng(seed);
    auto r = Records(RandomScores(rng, 10, false), RandomScores(rng, 10, false), "test-main");
    auto w = Records(RandomScores(rng, 6, false), RandomScores(rng, 6, false), "test-wild");
    r.insert(r.end(), w.begin(), w.end());
    return r;
  };
  MultiRoundReport same = MultiRound({7, 7, 7}, round);
  ASSERT_EQ(same.rounds.size(), 3u);
  for (size_t k = 0; k < same.mean_eer.size(); ++k) {
    EXPECT_EQ(same.rounds[0][k].result.eer, same.rounds[1][k].result.eer);
    EXPECT_NEAR(same.mean_eer[k].second, same.rounds[0][k].result.eer, 1e-15);
  }
  MultiRoundReport r = MultiRound({1, 2, 3}, round);
  ASSERT_EQ(r.mean_eer.size(), 3u);
  EXPECT_EQ(r.mean_eer[0].first, "test-main");
  EXPECT_EQ(r.mean_eer[1].first, "test-wild");
  EXPECT_EQ(r.mean_eer[2].first, kPooledSetName);
  for (size_t k = 0; k < 3; ++k) {
    double sum = 0;
    for (const auto &rows : r.rounds) sum += rows[k].result.eer;
    EXPECT_EQ(r.mean_eer[k].second, sum / 3);
  }
  std::string text = FormatMultiRoundReport(r);
  EXPECT_NE(text.find("eer_pct_mean"), std::string::npos);
  EXPECT_NE(text.find("Pooled"), std::string::npos);
}

TEST(MultiRoundTest, FailingRoundNamesIndex) {
  try {
    MultiRound({1, 2, 3}, [](int i, uint64_t) -> std::vector<ScoreRecord> {
      if (i == 1) throw IoError("boom");
      return Records({1.0}, {0.0});
    });
    FAIL();
  } catch (const std::exception &e) {
    EXPECT_NE(std::string(e.what()).find("round 1"), std::string::npos) << e.what();
  }
}

std::vector<Waveform> Utts(int n) {
  std::vector<Waveform> v;
  for (int i = 0; i < n; ++i) {
    Waveform w;
    w.samples = testing::RandomWave(4000 + 1000 * i, i);
    v.push_back(w);
  }
  return v;
}

TEST(HistogramTest, MassIdentityAndMirror) {
  EncoderParams a = InitEncoder(testing::TinyEncoderConfig(), 1),
                b = InitEncoder(testing::TinyEncoderConfig(), 2);
  auto utts = Utts(3);
  long mass = 0;
  for (const auto &w : utts) mass += EncoderFrames(a.config, w.samples.size()) * 8;
  Histogram h = FeatureDiffHistogram(a, b, utts, 21);
  ASSERT_EQ(h.counts.size(), 21u);
  ASSERT_EQ(h.edges.size(), 22u);
  long total = 0;
  for (long c : h.counts) total += c;
  EXPECT_EQ(total, mass);
  EXPECT_EQ(h.edges.front(), -h.edges.back());

  Histogram r = FeatureDiffHistogram(b, a, utts, 21);
  std::vector<long> rev(r.counts.rbegin(), r.counts.rend());
  EXPECT_EQ(h.counts, rev);

  Histogram same = FeatureDiffHistogram(a, a, utts, 21);
  EXPECT_EQ(same.counts[10], mass);
  EXPECT_THROW(FeatureDiffHistogram(a, b, utts, 20), ConfigError);
}

TEST(HistogramTest, MirrorOnRawValues) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v, neg;
    for (int i = 0; i < 200; ++i) {
      double x = trial % 2 ? std::round(rng.Normal() * 4) / 4 : rng.Normal();
      v.push_back(x);
      neg.push_back(-x);
    }
    Histogram h = BuildSymmetricHistogram(v, 11), g = BuildSymmetricHistogram(neg, 11);
    EXPECT_EQ(h.counts, std::vector<long>(g.counts.rbegin(), g.counts.rend()));
  }
}

TEST(TrajectoryTest, ShapeSelectionAndFallback) {
  EncoderParams a = InitEncoder(EncoderConfig(), 1), b = InitEncoder(EncoderConfig(), 2);
  Waveform w;
  w.samples = testing::RandomWave(16000, 9);
  Trajectory t = FeatureTrajectory({{"a", a}, {"b", b}}, w, DimSelect::kMaxDiffVariance);
  ASSERT_EQ(t.values.rows(), 50);
  ASSERT_EQ(t.values.cols(), 3);
  EXPECT_EQ(t.names, (std::vector<std::string>{"a", "b", "diff"}));

  // Exhaustive variance scan.
  Matrix diff = Encode(a, w).values - Encode(b, w).values;
  auto var = [&](int d) {
    double m = diff.col(d).mean();
    return (diff.col(d).array() - m).square().mean();
  };
  for (int d = 0; d < 64; ++d) EXPECT_GE(var(t.dim), var(d)) << d;
  EXPECT_EQ(t.values.col(2), diff.col(t.dim));

  Trajectory z = FeatureTrajectory({{"a", a}, {"a2", a}}, w, DimSelect::kMaxDiffVariance);
  EXPECT_EQ(z.dim, 0);
  EXPECT_TRUE(z.values.col(2).isZero(0));

  Trajectory k = FeatureTrajectory({{"a", a}, {"b", b}}, w, DimSelect::kIndex, 5);
  EXPECT_EQ(k.dim, 5);
  EXPECT_THROW(FeatureTrajectory({{"a", a}, {"b", b}}, w, DimSelect::kIndex, 64),
               InputError);
}

}  // namespace
}  // namespace voclab
