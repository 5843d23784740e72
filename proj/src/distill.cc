// distill.cc

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

#include "voclab/distill.h"

#include <cmath>

#include "voclab/errors.h"

namespace voclab {

namespace {

void CheckShapes(const Matrix &a, const Matrix &b, const char *what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError(std::string(what) + ": shape mismatch (" +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
}

}  // namespace

void DistillConfig::Validate() const {
  if (!(lambda_dis >= 0.0) || !std::isfinite(lambda_dis))
    throw ConfigError("distill.lambda must be a finite value >= 0");
}

std::string DistillTargetName(DistillTargetKind k) {
  return k == DistillTargetKind::kOutput ? "output" : "hidden";
}

DistillTargetKind ParseDistillTarget(const std::string &s) {
  if (s == "output") return DistillTargetKind::kOutput;
  if (s == "hidden") return DistillTargetKind::kHidden;
  throw ConfigError("distill.target must be output or hidden, got '" + s + "'");
}

std::string StudentInitName(StudentInit s) {
  return s == StudentInit::kTeacher ? "teacher" : "random";
}

StudentInit ParseStudentInit(const std::string &s) {
  if (s == "teacher") return StudentInit::kTeacher;
  if (s == "random") return StudentInit::kRandom;
  throw ConfigError("distill.init must be teacher or random, got '" + s + "'");
}

FeatureSequence DiffFeatures(const FeatureSequence &x, const FeatureSequence &y,
                             DiffMode mode) {
  CheckShapes(x.values, y.values, "diff_features");
  FeatureSequence out{x.id, x.values - y.values};
  if (mode == DiffMode::kAbsolute) out.values = out.values.cwiseAbs();
  return out;
}

double DistillationLoss(const Matrix &x, const Matrix &y, const Matrix &z) {
  CheckShapes(x, y, "distillation_loss(x, x~)");
  CheckShapes(x, z, "distillation_loss(x, z)");
  if (x.rows() == 0) throw InputError("distillation_loss: empty sequence");
  return (z - (x - y).cwiseAbs()).cwiseAbs().sum() /
         static_cast<double>(x.rows());
}

ad::Var DistillationLossGraph(ad::Var z, const Matrix &target) {
  CheckShapes(z.value(), target, "distillation_loss");
  const ad::Var t = z.tape->Constant(target);
  return ad::Scale(ad::Sum(ad::Abs(ad::Sub(z, t))),
                   1.0 / static_cast<double>(target.rows()));
}

void CheckTeacherPair(const EncoderParams &a, const EncoderParams &b) {
  if (a.config.dim != b.config.dim || a.config.depth != b.config.depth)
    throw InputError("teacher encoders differ in dim/depth (" +
                     std::to_string(a.config.dim) + "/" +
                     std::to_string(a.config.depth) + " vs " +
                     std::to_string(b.config.dim) + "/" +
                     std::to_string(b.config.depth) + ")");
}

EncoderParams InitStudent(const DistillConfig &cfg, const EncoderParams &a,
                          const EncoderParams &b, uint64_t seed) {
  cfg.Validate();
  CheckTeacherPair(a, b);
  if (cfg.student_init == StudentInit::kTeacher) {
    EncoderParams s = a;
    s.stage = "student";
    return s;
  }
  EncoderParams s = InitEncoder(a.config, seed);
  s.stage = "student";
  return s;
}

EncoderParams InitStudent(const DistillConfig &cfg, uint64_t seed) {
  const EncoderParams a = LoadEncoder(cfg.teacher_a_ckpt);
  const EncoderParams b = LoadEncoder(cfg.teacher_b_ckpt);
  return InitStudent(cfg, a, b, seed);
}

std::vector<Matrix> DistillTarget(const DistillConfig &cfg,
                                  const EncoderParams &a,
                                  const EncoderParams &b,
                                  const std::vector<double> &samples) {
  CheckTeacherPair(a, b);
  ValidateEncoderInput(samples, "");
  ad::Tape tape;
  const BoundParams ba(tape, a.arrays, false), bb(tape, b.arrays, false);
  const EncoderTrace ta = EncoderForward(a.config, ba, samples);
  const EncoderTrace tb = EncoderForward(b.config, bb, samples);
  std::vector<Matrix> out;
  if (cfg.target == DistillTargetKind::kOutput) {
    out.push_back((ta.output.value() - tb.output.value()).cwiseAbs());
  } else {
    for (size_t i = 0; i < ta.hidden.size(); ++i)
      out.push_back((ta.hidden[i].value() - tb.hidden[i].value()).cwiseAbs());
  }
  return out;
}

}  // namespace voclab
