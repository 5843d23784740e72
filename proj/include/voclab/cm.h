// voclab/cm.h

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

#ifndef VOCLAB_CM_H_
#define VOCLAB_CM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voclab/augment.h"
#include "voclab/distill.h"
#include "voclab/manifest.h"
#include "voclab/params.h"
#include "voclab/ssl-encoder.h"

namespace voclab {

inline constexpr double kLeakySlope = 0.1;

// Global average pooling followed by fc1..fc3 (D -> D, LeakyReLU 0.1) and a
// linear D -> 1 output.  Arrays: fc{1,2,3}.{weight,bias}, out.{weight,bias}.
struct BackendParams {
  int dim = 0;
  ParamMap arrays;
};

BackendParams InitBackend(int dim, uint64_t seed);

// Raw logit; higher means more likely bona fide.
double BackendScore(const BackendParams &backend, const FeatureSequence &feats);
ad::Var BackendGraph(const BoundParams &backend, ad::Var feats);

// Binary cross-entropy of sigmoid(score) with bona fide = 1, written as a
// softplus so large |score| does not overflow.
double CrossEntropyLoss(double score, Label label);
ad::Var CrossEntropyGraph(ad::Var score, Label label);

enum class ViewClass { kBona, kVoc };

struct ViewEmbedding {
  RowVector embedding;
  std::string utt;
  ViewClass view_class;
};

struct ViewTag {
  std::string utt;
  ViewClass view_class;
};

inline constexpr double kContrastiveTemperature = 0.07;

/**
   Supervised contrastive loss over L2-normalised embeddings.  For anchor a
   the positives P(a) are the other embeddings with the same utterance and
   view class; every other embedding is a negative.
     loss = mean_a  -1/|P(a)| sum_{p in P(a)} log( exp(s_ap / t) /
                                                   sum_{b != a} exp(s_ab / t) )
   Throws InputError for fewer than 2 embeddings or an anchor with no
   positive.
*/
double ContrastiveFeatureLoss(const std::vector<ViewEmbedding> &views,
                              double temperature = kContrastiveTemperature);
// Graph form; rows of `embeddings` are un-normalised view embeddings.
ad::Var ContrastiveLossGraph(ad::Var embeddings,
                             const std::vector<ViewTag> &tags,
                             double temperature = kContrastiveTemperature);

struct TrainConfig {
  double lr0 = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  double lr_decay = 0.1;
  int lr_decay_every = 10;
  int patience = 10;
  double max_trunc_s = 4.0;
  double lambda_cf = 1.0;
  double lambda_dis = 100.0;
  double temperature = kContrastiveTemperature;
  int batch_size = 4;
  int max_epochs = 30;
  // 0 = one pass over the data; otherwise the number of randomly sampled
  // mini-batches per epoch.
  int batches_per_epoch = 0;
  bool aug_enabled = true;
  AugmentConfig aug;
  uint64_t seed = 0;

  void Validate() const;
  // The downstream recipe's initial learning rate (5e-6) for full-size runs.
  static TrainConfig PaperRecipe();
};

// lr0 * decay^floor(epoch / decay_every).
double LearningRate(const TrainConfig &cfg, int epoch);

// ce + lambda_cf * cf + lambda_dis * dis.
double TotalLoss(double ce, double cf, double dis, const TrainConfig &cfg);

enum class CmMode { kSingle, kDualDiff, kDistilled };
std::string CmModeName(CmMode m);
CmMode ParseCmMode(const std::string &s);

struct CMModel {
  CmMode mode = CmMode::kSingle;
  // Trainable front end (the student in distilled mode).
  EncoderParams encoder;
  // Frozen second encoder of the dual-encoder front end.
  std::optional<EncoderParams> encoder_b;
  // Distilled mode only; teachers stay frozen.
  DistillConfig distill;
  std::optional<EncoderParams> teacher_a;
  std::optional<EncoderParams> teacher_b;
  BackendParams backend;

  void Validate() const;
};

CMModel MakeSingleCm(const EncoderParams &encoder, uint64_t seed);
CMModel MakeDualDiffCm(const EncoderParams &encoder,
                       const EncoderParams &encoder_b, uint64_t seed);
// Student initialised per cfg.student_init; the student draws from a seed
// derived from `seed`.
CMModel MakeDistilledCm(const DistillConfig &cfg, const EncoderParams &teacher_a,
                        const EncoderParams &teacher_b, uint64_t seed);

// Front-end features fed to the back end.
FeatureSequence CmFeatures(const CMModel &model, const Waveform &w);
// Full-length forward pass.
double CmScore(const CMModel &model, const Waveform &w);

// One view of a training micro-batch.
struct BatchView {
  std::vector<double> samples;
  Label label;
  std::string utt;
  ViewClass view_class;
  // Views without a contrastive partner are excluded from L_CF.
  bool contrastive = true;
};

struct BoundCm {
  BoundParams encoder;
  BoundParams encoder_b;
  BoundParams backend;
};

BoundCm BindCm(ad::Tape &tape, const CMModel &model, bool trainable);

struct LossParts {
  ad::Var total;
  double ce = 0, cf = 0, dis = 0;
};

// ce: mean over views; cf: contrastive loss over the flagged views (0 when
// lambda_cf == 0 or fewer than two); dis: mean distillation loss over views in
// distilled mode (averaged over blocks for hidden targets), else 0.
LossParts BatchLoss(const CMModel &model, const BoundCm &bound,
                    const std::vector<BatchView> &views,
                    const TrainConfig &cfg);

// Early stopping on a validation loss.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}
  // Returns true when training should stop after this epoch.
  bool Update(int epoch, double loss);
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  bool improved() const { return improved_; }

 private:
  int patience_;
  int best_epoch_ = -1;
  double best_loss_ = 0.0;
  bool improved_ = false;
};

struct FinetuneEpoch {
  int epoch;
  double lr;
  double train_loss;
  double ce, cf, dis;
  double dev_loss;
};

struct FinetuneReport {
  std::vector<FinetuneEpoch> epochs;
  int best_epoch = -1;
  int stopped_epoch = -1;
};

struct FinetuneResult {
  CMModel model;  // checkpoint with the best dev loss
  FinetuneReport report;
};

/**
   Supervised fine-tuning of front end and back end.  Each spoofed training
   utterance whose id is `<bona id>__<vocoder>` forms a group with its source;
   with augmentation the group contributes the four views bona, aug(bona),
   voc, aug(voc).  Unpaired utterances contribute singleton views that only
   enter the cross-entropy.  Utterances are randomly cropped to max_trunc_s.
   The dev loss is the mean cross-entropy over full-length dev utterances.
*/
FinetuneResult Finetune(const CMModel &model, const Manifest &bona,
                        const Manifest &spoof, const TrainConfig &cfg,
                        const Manifest &dev);

double DevLoss(const CMModel &model, const std::vector<Waveform> &dev,
               const std::vector<Label> &labels);

void WriteFinetuneReport(const std::string &path, const FinetuneReport &r);

// CM checkpoint: encoders and back end under "encoder.", "encoder_b." and
// "backend." prefixes.  Teachers are referenced by path only.
void SaveCm(const std::string &path, const CMModel &model);
CMModel LoadCm(const std::string &path);

}  // namespace voclab

#endif  // VOCLAB_CM_H_
