// voclab/params.h

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

#ifndef VOCLAB_PARAMS_H_
#define VOCLAB_PARAMS_H_

#include <map>
#include <string>

#include "voclab/autograd.h"
#include "voclab/checkpoint.h"

namespace voclab {

// Parameter arrays placed on a tape, either as trainable leaves or as
// constants (frozen / inference-only).
class BoundParams {
 public:
  BoundParams() = default;
  BoundParams(ad::Tape &tape, const ParamMap &params, bool trainable,
              const std::string &prefix = "");

  ad::Var operator[](const std::string &name) const;
  bool trainable() const { return trainable_; }
  // Gradients keyed by the original (unprefixed) names; zero where no
  // gradient reached the leaf.
  ParamMap Grads() const;

 private:
  std::string prefix_;
  bool trainable_ = false;
  std::map<std::string, ad::Var> vars_;
};

// Adam with bias correction.
class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void Step(ParamMap &params, const ParamMap &grads, double lr);

 private:
  double beta1_, beta2_, eps_;
  long step_ = 0;
  ParamMap m_, v_;
};

bool AllFinite(const ParamMap &params);
// Adds b * scale into a (same keys).
void Accumulate(ParamMap &a, const ParamMap &b, double scale = 1.0);

}  // namespace voclab

#endif  // VOCLAB_PARAMS_H_
