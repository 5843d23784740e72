// cm-losses.cc

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

namespace voclab {

namespace {

// Row weights selecting the positives of every anchor, scaled so that
// WeightedSum gives (1/M) sum_a 1/|P(a)| sum_p s_ap.
Matrix PositiveWeights(const std::vector<ViewTag> &tags) {
  const int m = static_cast<int>(tags.size());
  if (m < 2) throw InputError("contrastive loss needs at least 2 embeddings");
  Matrix w = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    int n_pos = 0;
    for (int p = 0; p < m; ++p)
      if (p != a && tags[p].utt == tags[a].utt &&
          tags[p].view_class == tags[a].view_class)
        ++n_pos;
    if (n_pos == 0)
      throw InputError("contrastive anchor " + std::to_string(a) + " (" +
                       tags[a].utt + ") has no positive");
    for (int p = 0; p < m; ++p)
      if (p != a && tags[p].utt == tags[a].utt &&
          tags[p].view_class == tags[a].view_class)
        w(a, p) = 1.0 / (static_cast<double>(n_pos) * m);
  }
  return w;
}

}  // namespace

double CrossEntropyLoss(double score, Label label) {
  const double x = label == Label::kBonafide ? -score : score;
  // softplus(x) = max(x, 0) + log1p(exp(-|x|))
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

ad::Var CrossEntropyGraph(ad::Var score, Label label) {
  return ad::Softplus(label == Label::kBonafide ? ad::Scale(score, -1.0)
                                                : score);
}

ad::Var ContrastiveLossGraph(ad::Var embeddings,
                             const std::vector<ViewTag> &tags,
                             double temperature) {
  if (static_cast<size_t>(embeddings.rows()) != tags.size())
    throw InputError("contrastive loss: embedding/tag count mismatch");
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  const Matrix pos = PositiveWeights(tags);
  const Eigen::Index m = embeddings.rows();
  const ad::Var e = ad::L2NormalizeRows(embeddings, 1e-12);
  const ad::Var sim = ad::Scale(ad::MatMulTransB(e, e), 1.0 / temperature);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> include(m, m);
  include.setConstant(true);
  for (Eigen::Index i = 0; i < m; ++i) include(i, i) = false;
  const ad::Var lse = ad::MaskedLogSumExpRows(sim, include);
  return ad::Sub(ad::Mean(lse), ad::WeightedSum(sim, pos));
}

double ContrastiveFeatureLoss(const std::vector<ViewEmbedding> &views,
                              double temperature) {
  if (views.empty()) throw InputError("contrastive loss needs embeddings");
  const Eigen::Index d = views[0].embedding.cols();
  Matrix emb(static_cast<Eigen::Index>(views.size()), d);
  std::vector<ViewTag> tags;
  for (size_t i = 0; i < views.size(); ++i) {
    if (views[i].embedding.cols() != d)
      throw InputError("contrastive embeddings differ in dimension");
    emb.row(i) = views[i].embedding;
    tags.push_back({views[i].utt, views[i].view_class});
  }
  ad::Tape tape;
  return ContrastiveLossGraph(tape.Constant(emb), tags, temperature).scalar();
}

double TotalLoss(double ce, double cf, double dis, const TrainConfig &cfg) {
  return ce + cfg.lambda_cf * cf + cfg.lambda_dis * dis;
}

}  // namespace voclab
