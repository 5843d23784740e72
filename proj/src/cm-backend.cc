// cm-backend.cc

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

#include <cmath>

#include "voclab/cm.h"
#include "voclab/errors.h"
#include "voclab/rng.h"

namespace voclab {

namespace {

ad::Var Affine(ad::Var x, ad::Var w, ad::Var b) {
  return ad::AddRow(ad::MatMul(x, w), b);
}

}  // namespace

BackendParams InitBackend(int dim, uint64_t seed) {
  if (dim < 1) throw ConfigError("back-end dim must be >= 1");
  BackendParams p;
  p.dim = dim;
  Rng rng(seed);
  auto random = [&](int rows, int cols) {
    Matrix m(rows, cols);
    const double sd = 1.0 / std::sqrt(static_cast<double>(rows));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sd * rng.Normal();
    return m;
  };
  for (const char *name : {"fc1", "fc2", "fc3"}) {
    p.arrays[std::string(name) + ".weight"] = random(dim, dim);
    p.arrays[std::string(name) + ".bias"] = Matrix::Zero(1, dim);
  }
  p.arrays["out.weight"] = random(dim, 1);
  p.arrays["out.bias"] = Matrix::Zero(1, 1);
  return p;
}

ad::Var BackendGraph(const BoundParams &b, ad::Var feats) {
  if (feats.rows() < 1) throw InputError("back end needs at least one frame");
  ad::Var h = ad::MeanRows(feats);
  for (const char *name : {"fc1", "fc2", "fc3"}) {
    const std::string n(name);
    h = ad::LeakyRelu(Affine(h, b[n + ".weight"], b[n + ".bias"]),
                      kLeakySlope);
  }
  return Affine(h, b["out.weight"], b["out.bias"]);
}

double BackendScore(const BackendParams &backend, const FeatureSequence &feats) {
  if (feats.values.cols() != backend.dim)
    throw InputError("feature dim " + std::to_string(feats.values.cols()) +
                     " does not match back-end dim " +
                     std::to_string(backend.dim));
  ad::Tape tape;
  BoundParams bound(tape, backend.arrays, false);
  return BackendGraph(bound, tape.Constant(feats.values)).scalar();
}

}  // namespace voclab
