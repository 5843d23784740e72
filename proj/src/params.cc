// params.cc

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

#include "voclab/params.h"

#include <cmath>
#include <stdexcept>

namespace voclab {

BoundParams::BoundParams(ad::Tape &tape, const ParamMap &params,
                         bool trainable, const std::string &prefix)
    : prefix_(prefix), trainable_(trainable) {
  for (const auto &[name, value] : params)
    vars_[name] = trainable ? tape.Parameter(value) : tape.Constant(value);
}

ad::Var BoundParams::operator[](const std::string &name) const {
  auto it = vars_.find(name);
  if (it == vars_.end())
    throw std::logic_error("missing parameter '" + prefix_ + name + "'");
  return it->second;
}

ParamMap BoundParams::Grads() const {
  ParamMap out;
  for (const auto &[name, var] : vars_) {
    const Matrix &g = var.grad();
    out[name] = g.size() == 0 ? Matrix::Zero(var.rows(), var.cols()) : g;
  }
  return out;
}

void Adam::Step(ParamMap &params, const ParamMap &grads, double lr) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (auto &[name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Matrix &g = git->second;
    Matrix &m = m_[name];
    Matrix &v = v_[name];
    if (m.size() == 0) {
      m = Matrix::Zero(p.rows(), p.cols());
      v = Matrix::Zero(p.rows(), p.cols());
    }
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseAbs2();
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

bool AllFinite(const ParamMap &params) {
  for (const auto &[name, p] : params)
    if (!p.allFinite()) return false;
  return true;
}

void Accumulate(ParamMap &a, const ParamMap &b, double scale) {
  for (const auto &[name, g] : b) {
    auto it = a.find(name);
    if (it == a.end()) a[name] = g * scale;
    else it->second += g * scale;
  }
}

}  // namespace voclab
