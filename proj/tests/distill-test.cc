// tests/distill-test.cc
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
#include "voclab/distill.h"
#include "voclab/errors.h"

namespace voclab {
namespace {

const auto ReferenceLoss = testing::ReferenceDistillationLoss;

FeatureSequence Seq(const Matrix &m) { return {"u", m}; }

TEST(DiffFeaturesTest, Examples) {
  Matrix x(1, 2), y(1, 2);
  x << 1, 2;
  y << 0, 4;
  EXPECT_EQ(DiffFeatures(Seq(x), Seq(y), DiffMode::kAbsolute).values,
            (Matrix(1, 2) << 1, 2).finished());
  EXPECT_EQ(DiffFeatures(Seq(x), Seq(y), DiffMode::kSigned).values,
            (Matrix(1, 2) << 1, -2).finished());
  for (auto mode : {DiffMode::kSigned, DiffMode::kAbsolute})
    EXPECT_TRUE(DiffFeatures(Seq(x), Seq(x), mode).values.isZero(0));
}

TEST(DiffFeaturesTest, AntisymmetryAndShapeError) {
  Rng rng(1);
  Matrix x = testing::RandomMatrix(5, 3, rng), y = testing::RandomMatrix(5, 3, rng);
  EXPECT_EQ(DiffFeatures(Seq(x), Seq(y), DiffMode::kSigned).values,
            -DiffFeatures(Seq(y), Seq(x), DiffMode::kSigned).values);
  try {
    DiffFeatures(Seq(x), Seq(Matrix::Zero(4, 3)), DiffMode::kSigned);
    FAIL();
  } catch (const InputError &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("5x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("4x3"), std::string::npos) << msg;
  }
}

TEST(DistillationLossTest, HandExamples) {
  Matrix x(1, 2), y(1, 2), z = Matrix::Zero(1, 2);
  x << 1, 2;
  y << 0, 4;
  EXPECT_EQ(DistillationLoss(x, y, z), 3.0);
  EXPECT_EQ(ReferenceLoss(x, y, z), 3.0);
  EXPECT_EQ(DistillationLoss(x, y, (x - y).cwiseAbs()), 0.0);
  EXPECT_EQ(DistillationLoss(x, x, z), 0.0);
  EXPECT_THROW(DistillationLoss(x, y, Matrix::Zero(2, 2)), InputError);
}

TEST(DistillationLossTest, MatchesReferenceAndInvariances) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + rng.UniformInt(20), d = 1 + rng.UniformInt(16);
    Matrix x = testing::RandomMatrix(n, d, rng), y = testing::RandomMatrix(n, d, rng),
           z = testing::RandomMatrix(n, d, rng);
    double loss = DistillationLoss(x, y, z);
    EXPECT_NEAR(loss, ReferenceLoss(x, y, z), 1e-12);
    EXPECT_GE(loss, 0.0);
    // Teacher swap.
    EXPECT_EQ(loss, DistillationLoss(y, x, z));
    // Common offset: exact whenever the shifted values are representable,
    // here up to rounding of the additions.
    Matrix c = testing::RandomMatrix(n, d, rng, 3.0);
    EXPECT_NEAR(loss, DistillationLoss(x + c, y + c, z), 1e-12 * n * d);
    // Homogeneity of the zero-loss target.
    double alpha = rng.Uniform(0.0, 4.0);
    Matrix target = (alpha * x - alpha * y).cwiseAbs();
    EXPECT_NEAR(DistillationLoss(alpha * x, alpha * y, target), 0.0, 1e-12);
    EXPECT_LT((target - alpha * (x - y).cwiseAbs()).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(DistillationLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = testing::CheckDistillationGradient(rng);
    EXPECT_LT(r.max_rel_err, 1e-4) << r.worst;
  }
}

EncoderParams Teacher(uint64_t seed) {
  return InitEncoder(testing::TinyEncoderConfig(), seed);
}

TEST(InitStudentTest, TeacherModeCopies) {
  DistillConfig cfg;
  EncoderParams a = Teacher(1), b = Teacher(2);
  EncoderParams s = InitStudent(cfg, a, b, 99);
  for (const auto &[name, m] : a.arrays) EXPECT_EQ(s.arrays.at(name), m);
  Waveform w;
  w.samples = testing::RandomWave(5000, 1);
  EXPECT_EQ(Encode(s, w).values, Encode(a, w).values);
}

TEST(InitStudentTest, RandomModeIsFreshAndSeeded) {
  DistillConfig cfg;
  cfg.student_init = StudentInit::kRandom;
  EncoderParams a = Teacher(1), b = Teacher(2);
  EncoderParams s1 = InitStudent(cfg, a, b, 5), s2 = InitStudent(cfg, a, b, 5);
  for (const auto &[name, m] : s1.arrays) EXPECT_EQ(s2.arrays.at(name), m);
  auto differs = [&](const EncoderParams &t) {
    for (const auto &[name, m] : s1.arrays)
      if (t.arrays.at(name) != m) return true;
    return false;
  };
  EXPECT_TRUE(differs(a));
  EXPECT_TRUE(differs(b));
  EXPECT_TRUE(s1.config == a.config);
}

TEST(InitStudentTest, UnreadableCheckpointNamesPath) {
  DistillConfig cfg;
  cfg.teacher_a_ckpt = "/nonexistent/a.ckpt";
  cfg.teacher_b_ckpt = "/nonexistent/b.ckpt";
  try {
    InitStudent(cfg, 1);
    FAIL();
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/a.ckpt"),
              std::string::npos);
  }
}

TEST(TeacherPairTest, MismatchRejected) {
  EncoderConfig c = testing::TinyEncoderConfig();
  c.depth = 1;
  EXPECT_THROW(CheckTeacherPair(Teacher(1), InitEncoder(c, 1)), InputError);
  EXPECT_NO_THROW(CheckTeacherPair(Teacher(1), Teacher(2)));
}

TEST(DistillTargetTest, ShapesAndIdenticalTeachers) {
  EncoderParams a = Teacher(1), b = Teacher(2);
  auto samples = testing::RandomWave(6400, 3);
  DistillConfig cfg;
  auto out = DistillTarget(cfg, a, b, samples);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].rows(), 20);
  EXPECT_EQ(out[0].cols(), 8);
  Waveform w;
  w.samples = samples;
  EXPECT_EQ(out[0], (Encode(a, w).values - Encode(b, w).values).cwiseAbs());
  EXPECT_TRUE(DistillTarget(cfg, a, a, samples)[0].isZero(0));

  cfg.target = DistillTargetKind::kHidden;
  auto hid = DistillTarget(cfg, a, b, samples);
  ASSERT_EQ(hid.size(), 2u);
  for (const auto &m : DistillTarget(cfg, a, a, samples)) EXPECT_TRUE(m.isZero(0));
}

TEST(DistillConfigTest, Validation) {
  DistillConfig cfg;
  cfg.lambda_dis = -1;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  EXPECT_EQ(ParseDistillTarget("hidden"), DistillTargetKind::kHidden);
  EXPECT_EQ(ParseStudentInit("random"), StudentInit::kRandom);
  EXPECT_THROW(ParseDistillTarget("both"), ConfigError);
}

}  // namespace
}  // namespace voclab
