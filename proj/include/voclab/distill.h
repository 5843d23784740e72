// voclab/distill.h

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

#ifndef VOCLAB_DISTILL_H_
#define VOCLAB_DISTILL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "voclab/autograd.h"
#include "voclab/ssl-encoder.h"

namespace voclab {

enum class DiffMode { kSigned, kAbsolute };

enum class DistillTargetKind { kOutput, kHidden };
enum class StudentInit { kTeacher, kRandom };

struct DistillConfig {
  double lambda_dis = 100.0;
  DistillTargetKind target = DistillTargetKind::kOutput;
  StudentInit student_init = StudentInit::kTeacher;
  std::string teacher_a_ckpt;
  std::string teacher_b_ckpt;

  void Validate() const;
};

std::string DistillTargetName(DistillTargetKind k);
DistillTargetKind ParseDistillTarget(const std::string &s);
std::string StudentInitName(StudentInit s);
StudentInit ParseStudentInit(const std::string &s);

// signed: x - y; absolute: |x - y| element-wise.
FeatureSequence DiffFeatures(const FeatureSequence &x, const FeatureSequence &y,
                             DiffMode mode);

// (1/N) * sum_i || z_i - |x_i - y_i| ||_1; the per-frame norm sums over all
// D dimensions.
double DistillationLoss(const Matrix &x, const Matrix &y, const Matrix &z);

// Graph form with a precomputed constant target |x - y|.  The derivative of
// |.| at 0 is taken as 0.
ad::Var DistillationLossGraph(ad::Var z, const Matrix &target);

// Throws InputError unless both teachers share D and depth.
void CheckTeacherPair(const EncoderParams &a, const EncoderParams &b);

// Teacher mode: bit-exact copy of teacher A.  Random mode: fresh parameters
// with teacher A's architecture.
EncoderParams InitStudent(const DistillConfig &cfg, const EncoderParams &a,
                          const EncoderParams &b, uint64_t seed);
// Loads the teachers named in the config first.
EncoderParams InitStudent(const DistillConfig &cfg, uint64_t seed);

// Output mode: one matrix |enc_a(w) - enc_b(w)|.  Hidden mode: one matrix
// per transformer block.  Teachers run without gradient.
std::vector<Matrix> DistillTarget(const DistillConfig &cfg,
                                  const EncoderParams &a,
                                  const EncoderParams &b,
                                  const std::vector<double> &samples);

}  // namespace voclab

#endif  // VOCLAB_DISTILL_H_
