// autograd.cc

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

#include "voclab/autograd.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace voclab {
namespace ad {

namespace {

void CheckSameTape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape)
    throw std::logic_error("autograd: vars belong to different tapes");
}

void CheckSameShape(const Matrix &a, const Matrix &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::logic_error(std::string("autograd: shape mismatch in ") + op);
}

}  // namespace

const Matrix &Var::value() const { return tape->Value(id); }
const Matrix &Var::grad() const { return tape->Grad(id); }
bool Var::requires_grad() const { return tape->RequiresGrad(id); }

Var Tape::Constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Parameter(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), true, nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Push(Matrix value, std::vector<int> inputs,
               std::function<void(Tape &, int)> backward) {
  bool needs = false;
  for (int i : inputs) needs = needs || nodes_[i].requires_grad;
  nodes_.push_back(
      Node{std::move(value), Matrix(), needs, needs ? std::move(backward)
                                                    : nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Matrix &Tape::GradRef(int id) {
  Node &n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::Backward(Var out) {
  if (out.tape != this) throw std::logic_error("autograd: foreign var");
  if (nodes_[out.id].value.size() != 1)
    throw std::logic_error("autograd: Backward needs a scalar output");
  for (auto &n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[out.id].requires_grad) return;
  GradRef(out.id)(0, 0) = 1.0;
  for (int i = out.id; i >= 0; --i) {
    Node &n = nodes_[i];
    if (n.backward && n.grad.size() != 0) n.backward(*this, i);
  }
}

// Inside a backward closure, accumulates g into input `id` when it is
// differentiable.
#define VOCLAB_ACC(t, id, expr)                     \
  do {                                              \
    if ((t).RequiresGrad(id)) (t).GradRef(id) += (expr); \
  } while (0)

Var MatMul(Var a, Var b) {
  CheckSameTape(a, b);
  if (a.cols() != b.rows()) throw std::logic_error("autograd: MatMul shape");
  int ia = a.id, ib = b.id;
  return a.tape->Push(a.value() * b.value(), {ia, ib},
                      [ia, ib](Tape &t, int self) {
                        const Matrix &g = t.Grad(self);
                        VOCLAB_ACC(t, ia, g * t.Value(ib).transpose());
                        VOCLAB_ACC(t, ib, t.Value(ia).transpose() * g);
                      });
}

Var MatMulTransB(Var a, Var b) {
  CheckSameTape(a, b);
  if (a.cols() != b.cols())
    throw std::logic_error("autograd: MatMulTransB shape");
  int ia = a.id, ib = b.id;
  return a.tape->Push(a.value() * b.value().transpose(), {ia, ib},
                      [ia, ib](Tape &t, int self) {
                        const Matrix &g = t.Grad(self);
                        VOCLAB_ACC(t, ia, g * t.Value(ib));
                        VOCLAB_ACC(t, ib, g.transpose() * t.Value(ia));
                      });
}

Var Add(Var a, Var b) {
  CheckSameTape(a, b);
  CheckSameShape(a.value(), b.value(), "Add");
  int ia = a.id, ib = b.id;
  return a.tape->Push(a.value() + b.value(), {ia, ib},
                      [ia, ib](Tape &t, int self) {
                        VOCLAB_ACC(t, ia, t.Grad(self));
                        VOCLAB_ACC(t, ib, t.Grad(self));
                      });
}

Var Sub(Var a, Var b) {
  CheckSameTape(a, b);
  CheckSameShape(a.value(), b.value(), "Sub");
  int ia = a.id, ib = b.id;
  return a.tape->Push(a.value() - b.value(), {ia, ib},
                      [ia, ib](Tape &t, int self) {
                        VOCLAB_ACC(t, ia, t.Grad(self));
                        VOCLAB_ACC(t, ib, -t.Grad(self));
                      });
}

Var Scale(Var a, double s) {
  int ia = a.id;
  return a.tape->Push(a.value() * s, {ia}, [ia, s](Tape &t, int self) {
    VOCLAB_ACC(t, ia, t.Grad(self) * s);
  });
}

Var AddScalar(Var a, double s) {
  int ia = a.id;
  return a.tape->Push((a.value().array() + s).matrix(), {ia},
                      [ia](Tape &t, int self) {
                        VOCLAB_ACC(t, ia, t.Grad(self));
                      });
}

Var Hadamard(Var a, Var b) {
  CheckSameTape(a, b);
  CheckSameShape(a.value(), b.value(), "Hadamard");
  int ia = a.id, ib = b.id;
  return a.tape->Push(a.value().cwiseProduct(b.value()), {ia, ib},
                      [ia, ib](Tape &t, int self) {
                        const Matrix &g = t.Grad(self);
                        VOCLAB_ACC(t, ia, g.cwiseProduct(t.Value(ib)));
                        VOCLAB_ACC(t, ib, g.cwiseProduct(t.Value(ia)));
                      });
}

Var AddRow(Var a, Var row) {
  CheckSameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols())
    throw std::logic_error("autograd: AddRow shape");
  int ia = a.id, ir = row.id;
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return a.tape->Push(std::move(out), {ia, ir}, [ia, ir](Tape &t, int self) {
    const Matrix &g = t.Grad(self);
    VOCLAB_ACC(t, ia, g);
    VOCLAB_ACC(t, ir, g.colwise().sum());
  });
}

Var MulRow(Var a, Var row) {
  CheckSameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols())
    throw std::logic_error("autograd: MulRow shape");
  int ia = a.id, ir = row.id;
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return a.tape->Push(std::move(out), {ia, ir}, [ia, ir](Tape &t, int self) {
    const Matrix &g = t.Grad(self);
    if (t.RequiresGrad(ia))
      t.GradRef(ia).array() +=
          g.array().rowwise() * t.Value(ir).row(0).array();
    VOCLAB_ACC(t, ir, g.cwiseProduct(t.Value(ia)).colwise().sum());
  });
}

Var Gelu(Var a) {
  int ia = a.id;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Matrix out = a.value().unaryExpr([inv_sqrt2](double x) {
    return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
  });
  return a.tape->Push(std::move(out), {ia}, [ia, inv_sqrt2](Tape &t, int self) {
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    Matrix d = t.Value(ia).unaryExpr([=](double x) {
      return 0.5 * (1.0 + std::erf(x * inv_sqrt2)) +
             x * inv_sqrt2pi * std::exp(-0.5 * x * x);
    });
    VOCLAB_ACC(t, ia, t.Grad(self).cwiseProduct(d));
  });
}

Var LeakyRelu(Var a, double slope) {
  int ia = a.id;
  Matrix out =
      a.value().unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
  return a.tape->Push(std::move(out), {ia}, [ia, slope](Tape &t, int self) {
    Matrix d = t.Value(ia).unaryExpr(
        [slope](double x) { return x > 0 ? 1.0 : slope; });
    VOCLAB_ACC(t, ia, t.Grad(self).cwiseProduct(d));
  });
}

Var Abs(Var a) {
  int ia = a.id;
  return a.tape->Push(a.value().cwiseAbs(), {ia}, [ia](Tape &t, int self) {
    Matrix d = t.Value(ia).unaryExpr([](double x) {
      return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    });
    VOCLAB_ACC(t, ia, t.Grad(self).cwiseProduct(d));
  });
}

Var Softplus(Var a) {
  int ia = a.id;
  Matrix out = a.value().unaryExpr([](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  });
  return a.tape->Push(std::move(out), {ia}, [ia](Tape &t, int self) {
    Matrix d = t.Value(ia).unaryExpr([](double x) {
      return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
    });
    VOCLAB_ACC(t, ia, t.Grad(self).cwiseProduct(d));
  });
}

Var LayerNormRows(Var a, double eps) {
  int ia = a.id;
  const Matrix &x = a.value();
  const Eigen::Index n = x.rows(), c = x.cols();
  Matrix y(n, c);
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    y.row(i) = (x.row(i).array() - mean) * inv_std(i);
  }
  Matrix y_copy = y;
  return a.tape->Push(
      std::move(y), {ia},
      [ia, inv_std, y = std::move(y_copy)](Tape &t, int self) {
        if (!t.RequiresGrad(ia)) return;
        const Matrix &g = t.Grad(self);
        Matrix &gx = t.GradRef(ia);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          const double mg = g.row(i).mean();
          const double mgy = g.row(i).dot(y.row(i)) / g.cols();
          gx.row(i).array() +=
              inv_std(i) * (g.row(i).array() - mg - y.row(i).array() * mgy);
        }
      });
}

Var SoftmaxRows(Var a) {
  int ia = a.id;
  const Matrix &x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    y.row(i) = (x.row(i).array() - m).exp();
    y.row(i) /= y.row(i).sum();
  }
  Matrix y_copy = y;
  return a.tape->Push(std::move(y), {ia},
                      [ia, y = std::move(y_copy)](Tape &t, int self) {
                        if (!t.RequiresGrad(ia)) return;
                        const Matrix &g = t.Grad(self);
                        Matrix &gx = t.GradRef(ia);
                        for (Eigen::Index i = 0; i < g.rows(); ++i) {
                          const double dot = g.row(i).dot(y.row(i));
                          gx.row(i).array() +=
                              y.row(i).array() * (g.row(i).array() - dot);
                        }
                      });
}

Var L2NormalizeRows(Var a, double eps) {
  int ia = a.id;
  const Matrix &x = a.value();
  Eigen::VectorXd norms(x.rows());
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    norms(i) = std::max(x.row(i).norm(), eps);
    y.row(i) = x.row(i) / norms(i);
  }
  Matrix y_copy = y;
  return a.tape->Push(
      std::move(y), {ia},
      [ia, norms, y = std::move(y_copy)](Tape &t, int self) {
        if (!t.RequiresGrad(ia)) return;
        const Matrix &g = t.Grad(self);
        Matrix &gx = t.GradRef(ia);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          const double dot = g.row(i).dot(y.row(i));
          gx.row(i) += (g.row(i) - y.row(i) * dot) / norms(i);
        }
      });
}

Var MaskedLogSumExpRows(
    Var a, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> &include) {
  int ia = a.id;
  const Matrix &x = a.value();
  if (include.rows() != x.rows() || include.cols() != x.cols())
    throw std::logic_error("autograd: MaskedLogSumExpRows mask shape");
  Matrix out(x.rows(), 1);
  Matrix soft = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (include(i, j)) m = std::max(m, x(i, j));
    if (!std::isfinite(m))
      throw std::logic_error("autograd: MaskedLogSumExpRows empty row");
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (include(i, j)) {
        soft(i, j) = std::exp(x(i, j) - m);
        s += soft(i, j);
      }
    soft.row(i) /= s;
    out(i, 0) = m + std::log(s);
  }
  return a.tape->Push(std::move(out), {ia},
                      [ia, soft = std::move(soft)](Tape &t, int self) {
                        if (!t.RequiresGrad(ia)) return;
                        const Matrix &g = t.Grad(self);
                        t.GradRef(ia) +=
                            (soft.array().colwise() * g.col(0).array())
                                .matrix();
                      });
}

Var Im2Col(Var a, int kernel, int stride, int pad_left, int pad_right) {
  int ia = a.id;
  const Matrix &x = a.value();
  const Eigen::Index len = x.rows(), ch = x.cols();
  const Eigen::Index padded = len + pad_left + pad_right;
  if (padded < kernel) throw std::logic_error("autograd: Im2Col too short");
  const Eigen::Index out_len = (padded - kernel) / stride + 1;
  Matrix cols = Matrix::Zero(out_len, kernel * ch);
  for (Eigen::Index t = 0; t < out_len; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = t * stride - pad_left + k;
      if (src < 0 || src >= len) continue;
      cols.block(t, k * ch, 1, ch) = x.row(src);
    }
  }
  return a.tape->Push(
      std::move(cols), {ia},
      [ia, kernel, stride, pad_left, len, ch](Tape &t, int self) {
        if (!t.RequiresGrad(ia)) return;
        const Matrix &g = t.Grad(self);
        Matrix &gx = t.GradRef(ia);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          for (int k = 0; k < kernel; ++k) {
            const Eigen::Index src = r * stride - pad_left + k;
            if (src < 0 || src >= len) continue;
            gx.row(src) += g.block(r, k * ch, 1, ch);
          }
        }
      });
}

Var ColSlice(Var a, Eigen::Index start, Eigen::Index n) {
  int ia = a.id;
  if (start < 0 || start + n > a.cols())
    throw std::logic_error("autograd: ColSlice range");
  Matrix out = a.value().middleCols(start, n);
  return a.tape->Push(std::move(out), {ia}, [ia, start, n](Tape &t, int self) {
    if (t.RequiresGrad(ia)) t.GradRef(ia).middleCols(start, n) += t.Grad(self);
  });
}

Var ConcatCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw std::logic_error("autograd: ConcatCols empty");
  Tape *tape = parts[0].tape;
  Eigen::Index rows = parts[0].rows(), cols = 0;
  std::vector<int> ids;
  for (const Var &p : parts) {
    if (p.tape != tape || p.rows() != rows)
      throw std::logic_error("autograd: ConcatCols shape");
    cols += p.cols();
    ids.push_back(p.id);
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Var &p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return tape->Push(std::move(out), ids, [ids](Tape &t, int self) {
    Eigen::Index off = 0;
    for (int id : ids) {
      const Eigen::Index c = t.Value(id).cols();
      if (t.RequiresGrad(id)) t.GradRef(id) += t.Grad(self).middleCols(off, c);
      off += c;
    }
  });
}

Var ConcatRows(const std::vector<Var> &parts) {
  if (parts.empty()) throw std::logic_error("autograd: ConcatRows empty");
  Tape *tape = parts[0].tape;
  Eigen::Index cols = parts[0].cols(), rows = 0;
  std::vector<int> ids;
  for (const Var &p : parts) {
    if (p.tape != tape || p.cols() != cols)
      throw std::logic_error("autograd: ConcatRows shape");
    rows += p.rows();
    ids.push_back(p.id);
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Var &p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return tape->Push(std::move(out), ids, [ids](Tape &t, int self) {
    Eigen::Index off = 0;
    for (int id : ids) {
      const Eigen::Index r = t.Value(id).rows();
      if (t.RequiresGrad(id)) t.GradRef(id) += t.Grad(self).middleRows(off, r);
      off += r;
    }
  });
}

Var ReplaceRows(Var a, Var row, const std::vector<bool> &mask) {
  CheckSameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols() ||
      static_cast<Eigen::Index>(mask.size()) != a.rows())
    throw std::logic_error("autograd: ReplaceRows shape");
  int ia = a.id, ir = row.id;
  Matrix out = a.value();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    if (mask[i]) out.row(i) = row.value().row(0);
  return a.tape->Push(std::move(out), {ia, ir},
                      [ia, ir, mask](Tape &t, int self) {
                        const Matrix &g = t.Grad(self);
                        for (Eigen::Index i = 0; i < g.rows(); ++i) {
                          if (mask[i]) {
                            if (t.RequiresGrad(ir)) t.GradRef(ir) += g.row(i);
                          } else if (t.RequiresGrad(ia)) {
                            t.GradRef(ia).row(i) += g.row(i);
                          }
                        }
                      });
}

Var MeanRows(Var a) {
  int ia = a.id;
  Matrix out = a.value().colwise().mean();
  return a.tape->Push(std::move(out), {ia}, [ia](Tape &t, int self) {
    if (!t.RequiresGrad(ia)) return;
    Matrix &gx = t.GradRef(ia);
    gx.rowwise() += t.Grad(self).row(0) / static_cast<double>(gx.rows());
  });
}

Var Sum(Var a) {
  int ia = a.id;
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->Push(std::move(out), {ia}, [ia](Tape &t, int self) {
    if (t.RequiresGrad(ia)) t.GradRef(ia).array() += t.Grad(self)(0, 0);
  });
}

Var Mean(Var a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var WeightedSum(Var a, const Matrix &weights) {
  CheckSameShape(a.value(), weights, "WeightedSum");
  int ia = a.id;
  Matrix out(1, 1);
  out(0, 0) = a.value().cwiseProduct(weights).sum();
  return a.tape->Push(std::move(out), {ia}, [ia, weights](Tape &t, int self) {
    VOCLAB_ACC(t, ia, weights * t.Grad(self)(0, 0));
  });
}

#undef VOCLAB_ACC

}  // namespace ad
}  // namespace voclab
