// voclab/autograd.h

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

#ifndef VOCLAB_AUTOGRAD_H_
#define VOCLAB_AUTOGRAD_H_

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace voclab {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

namespace ad {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape *tape = nullptr;
  int id = -1;

  const Matrix &value() const;
  const Matrix &grad() const;
  bool requires_grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

/**
   Reverse-mode differentiation over row-major double matrices.

   Nodes are appended in evaluation order, so a reverse sweep over the tape is
   a valid topological order.  Nodes whose inputs are all constants carry no
   backward closure, which makes a tape built from Constant() leaves a plain
   inference pass.
*/
class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Matrix value);
  Var Parameter(Matrix value);

  // Seeds d(out)/d(out) = 1 for a 1x1 output and propagates to all leaves.
  void Backward(Var out);

  // Internal API used by the op implementations.
  Var Push(Matrix value, std::vector<int> inputs,
           std::function<void(Tape &, int)> backward);
  const Matrix &Value(int id) const { return nodes_[id].value; }
  const Matrix &Grad(int id) const { return nodes_[id].grad; }
  bool RequiresGrad(int id) const { return nodes_[id].requires_grad; }
  // Returns the gradient buffer of `id`, zero-initialised on first use.
  Matrix &GradRef(int id);
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Tape &, int)> backward;
  };
  std::deque<Node> nodes_;
};

// Matrix products.
Var MatMul(Var a, Var b);
Var MatMulTransB(Var a, Var b);  // a * b^T

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Scale(Var a, double s);
Var AddScalar(Var a, double s);
Var Hadamard(Var a, Var b);
// Broadcasts a 1xC row over every row of a.
Var AddRow(Var a, Var row);
Var MulRow(Var a, Var row);

Var Gelu(Var a);
Var LeakyRelu(Var a, double slope);
// |x| with derivative 0 at x == 0.
Var Abs(Var a);
Var Softplus(Var a);

// Per-row normalisation to zero mean and unit variance, without affine.
Var LayerNormRows(Var a, double eps);
Var SoftmaxRows(Var a);
Var L2NormalizeRows(Var a, double eps);
// Row-wise log-sum-exp over entries where include(i, j) is true (Nx1).
Var MaskedLogSumExpRows(Var a, const Eigen::Array<bool, Eigen::Dynamic,
                                                 Eigen::Dynamic> &include);

// Unfolds a (T x C) sequence into (T_out x K*C) patches.  Row t of the output
// holds input rows [t*stride - pad_left, t*stride - pad_left + K) (zeros
// outside), channel-minor.
Var Im2Col(Var a, int kernel, int stride, int pad_left, int pad_right);

Var ColSlice(Var a, Eigen::Index start, Eigen::Index n);
Var ConcatCols(const std::vector<Var> &parts);
Var ConcatRows(const std::vector<Var> &parts);
// Rows with mask[i] true are replaced by `row` (1xC).
Var ReplaceRows(Var a, Var row, const std::vector<bool> &mask);

Var MeanRows(Var a);  // 1 x C
Var Sum(Var a);       // 1 x 1
Var Mean(Var a);      // 1 x 1
// Sum of a .* weights with constant weights.
Var WeightedSum(Var a, const Matrix &weights);

}  // namespace ad
}  // namespace voclab

#endif  // VOCLAB_AUTOGRAD_H_
