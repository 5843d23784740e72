// cm-train.cc

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "voclab/cm.h"
#include "voclab/corpus.h"
#include "voclab/errors.h"
#include "voclab/rng.h"
#include "voclab/ssl-train.h"

namespace voclab {

void TrainConfig::Validate() const {
  if (!(lr0 > 0)) throw ConfigError("lr0 must be > 0");
  if (!(lr_decay > 0 && lr_decay <= 1))
    throw ConfigError("lr_decay must lie in (0, 1]");
  if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(max_trunc_s * kSampleRate >= kMinEncoderSamples))
    throw ConfigError("max_trunc_s is shorter than one encoder window");
  if (!(lambda_cf >= 0)) throw ConfigError("lambda_cf must be >= 0");
  if (!(lambda_dis >= 0)) throw ConfigError("lambda_dis must be >= 0");
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (batches_per_epoch < 0) throw ConfigError("batches_per_epoch must be >= 0");
  aug.Validate();
}

TrainConfig TrainConfig::PaperRecipe() {
  TrainConfig c;
  c.lr0 = 5e-6;
  return c;
}

double LearningRate(const TrainConfig &cfg, int epoch) {
  return cfg.lr0 * std::pow(cfg.lr_decay, epoch / cfg.lr_decay_every);
}

std::string CmModeName(CmMode m) {
  switch (m) {
    case CmMode::kSingle: return "single";
    case CmMode::kDualDiff: return "dual_diff";
    case CmMode::kDistilled: return "distilled";
  }
  return "";
}

CmMode ParseCmMode(const std::string &s) {
  if (s == "single") return CmMode::kSingle;
  if (s == "dual_diff") return CmMode::kDualDiff;
  if (s == "distilled") return CmMode::kDistilled;
  throw ConfigError("unknown cm mode '" + s +
                    "' (expected single, dual_diff or distilled)");
}

void CMModel::Validate() const {
  ValidateEncoderParams(encoder);
  const int d = encoder.config.dim;
  if (backend.dim != d)
    throw ConfigError("back-end dim " + std::to_string(backend.dim) +
                      " does not match encoder dim " + std::to_string(d));
  if (mode == CmMode::kDualDiff) {
    if (!encoder_b) throw ConfigError("dual_diff mode needs a second encoder");
    ValidateEncoderParams(*encoder_b);
    if (encoder_b->config.dim != d)
      throw ConfigError("dual_diff encoders differ in dimension");
  }
  if (mode == CmMode::kDistilled) {
    distill.Validate();
    if (teacher_a.has_value() != teacher_b.has_value())
      throw ConfigError("distilled mode needs both teachers or neither");
    if (teacher_a) {
      CheckTeacherPair(*teacher_a, *teacher_b);
      if (teacher_a->config.dim != d)
        throw ConfigError("student and teachers differ in dimension");
      if (distill.target == DistillTargetKind::kHidden &&
          teacher_a->config.depth != encoder.config.depth)
        throw ConfigError("hidden-state distillation needs equal depths");
    }
  }
}

CMModel MakeSingleCm(const EncoderParams &encoder, uint64_t seed) {
  CMModel m;
  m.mode = CmMode::kSingle;
  m.encoder = encoder;
  m.backend = InitBackend(encoder.config.dim, DeriveSeed(seed, 1));
  m.Validate();
  return m;
}

CMModel MakeDualDiffCm(const EncoderParams &encoder,
                       const EncoderParams &encoder_b, uint64_t seed) {
  CMModel m;
  m.mode = CmMode::kDualDiff;
  m.encoder = encoder;
  m.encoder_b = encoder_b;
  m.backend = InitBackend(encoder.config.dim, DeriveSeed(seed, 1));
  m.Validate();
  return m;
}

CMModel MakeDistilledCm(const DistillConfig &cfg, const EncoderParams &teacher_a,
                        const EncoderParams &teacher_b, uint64_t seed) {
  CMModel m;
  m.mode = CmMode::kDistilled;
  m.distill = cfg;
  m.encoder = InitStudent(cfg, teacher_a, teacher_b, DeriveSeed(seed, 2));
  m.teacher_a = teacher_a;
  m.teacher_b = teacher_b;
  m.backend = InitBackend(teacher_a.config.dim, DeriveSeed(seed, 1));
  m.Validate();
  return m;
}

FeatureSequence CmFeatures(const CMModel &model, const Waveform &w) {
  FeatureSequence f = Encode(model.encoder, w);
  if (model.mode == CmMode::kDualDiff)
    f = DiffFeatures(f, Encode(*model.encoder_b, w), DiffMode::kSigned);
  return f;
}

double CmScore(const CMModel &model, const Waveform &w) {
  return BackendScore(model.backend, CmFeatures(model, w));
}

BoundCm BindCm(ad::Tape &tape, const CMModel &model, bool trainable) {
  BoundCm b;
  b.encoder = BoundParams(tape, model.encoder.arrays, trainable);
  if (model.encoder_b) b.encoder_b = BoundParams(tape, model.encoder_b->arrays, false);
  b.backend = BoundParams(tape, model.backend.arrays, trainable);
  return b;
}

LossParts BatchLoss(const CMModel &model, const BoundCm &bound,
                    const std::vector<BatchView> &views,
                    const TrainConfig &cfg) {
  if (views.empty()) throw InputError("empty micro-batch");
  const bool distilled = model.mode == CmMode::kDistilled;
  if (distilled && !(model.teacher_a && model.teacher_b))
    throw ConfigError("distilled training needs both teacher encoders");
  std::vector<ad::Var> ce_terms, dis_terms, embeddings;
  std::vector<ViewTag> tags;
  for (const BatchView &v : views) {
    ValidateEncoderInput(v.samples, v.utt);
    const EncoderTrace tr =
        EncoderForward(model.encoder.config, bound.encoder, v.samples);
    ad::Var feats = tr.output;
    if (model.mode == CmMode::kDualDiff) {
      const EncoderTrace tb =
          EncoderForward(model.encoder_b->config, bound.encoder_b, v.samples);
      feats = ad::Sub(feats, tb.output);
    }
    ce_terms.push_back(
        CrossEntropyGraph(BackendGraph(bound.backend, feats), v.label));
    if (v.contrastive) {
      embeddings.push_back(ad::MeanRows(feats));
      tags.push_back({v.utt, v.view_class});
    }
    if (distilled) {
      const std::vector<Matrix> tgt = DistillTarget(
          model.distill, *model.teacher_a, *model.teacher_b, v.samples);
      if (model.distill.target == DistillTargetKind::kOutput) {
        dis_terms.push_back(DistillationLossGraph(tr.output, tgt[0]));
      } else {
        ad::Var acc = DistillationLossGraph(tr.hidden[0], tgt[0]);
        for (size_t b = 1; b < tgt.size(); ++b)
          acc = ad::Add(acc, DistillationLossGraph(tr.hidden[b], tgt[b]));
        dis_terms.push_back(ad::Scale(acc, 1.0 / tgt.size()));
      }
    }
  }
  auto mean = [](const std::vector<ad::Var> &terms) {
    ad::Var acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) acc = ad::Add(acc, terms[i]);
    return ad::Scale(acc, 1.0 / terms.size());
  };
  LossParts out;
  const ad::Var ce = mean(ce_terms);
  out.ce = ce.scalar();
  out.total = ce;
  if (cfg.lambda_cf > 0 && embeddings.size() >= 2) {
    const ad::Var cf = ContrastiveLossGraph(ad::ConcatRows(embeddings), tags,
                                            cfg.temperature);
    out.cf = cf.scalar();
    out.total = ad::Add(out.total, ad::Scale(cf, cfg.lambda_cf));
  }
  if (distilled) {
    const ad::Var dis = mean(dis_terms);
    out.dis = dis.scalar();
    out.total = ad::Add(out.total, ad::Scale(dis, cfg.lambda_dis));
  }
  return out;
}

bool EarlyStopper::Update(int epoch, double loss) {
  improved_ = best_epoch_ < 0 || loss < best_loss_;
  if (improved_) {
    best_epoch_ = epoch;
    best_loss_ = loss;
  }
  return epoch - best_epoch_ >= patience_;
}

double DevLoss(const CMModel &model, const std::vector<Waveform> &dev,
               const std::vector<Label> &labels) {
  if (dev.empty()) throw ConfigError("dev set is empty");
  double total = 0.0;
  for (size_t i = 0; i < dev.size(); ++i)
    total += CrossEntropyLoss(CmScore(model, dev[i]), labels[i]);
  return total / dev.size();
}

namespace {

// Members of one training group: indices into the bona fide and spoofed
// waveform lists (-1 when absent).
struct Group {
  int bona = -1;
  int spoof = -1;
};

std::vector<double> Crop(const std::vector<double> &x, size_t max_len,
                         Rng &rng) {
  if (x.size() <= max_len) return x;
  const size_t off = rng.UniformInt(x.size() - max_len + 1);
  return std::vector<double>(x.begin() + off, x.begin() + off + max_len);
}

void AddViews(const Waveform &w, Label label, ViewClass cls, bool paired,
              const TrainConfig &cfg, Rng &rng, std::vector<BatchView> &out) {
  const size_t max_len =
      static_cast<size_t>(std::floor(cfg.max_trunc_s * kSampleRate));
  std::vector<double> x = Crop(w.samples, max_len, rng);
  const bool contrastive = paired && cfg.aug_enabled;
  if (cfg.aug_enabled) {
    Waveform tmp;
    tmp.id = w.id;
    tmp.samples = x;
    std::vector<double> aug = Augment(tmp, cfg.aug, rng.NextU64()).samples;
    out.push_back({std::move(x), label, w.id, cls, contrastive});
    out.push_back({std::move(aug), label, w.id, cls, contrastive});
  } else {
    out.push_back({std::move(x), label, w.id, cls, contrastive});
  }
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

FinetuneResult Finetune(const CMModel &init, const Manifest &bona,
                        const Manifest &spoof, const TrainConfig &cfg,
                        const Manifest &dev) {
  cfg.Validate();
  init.Validate();
  if (init.mode == CmMode::kDistilled && !(init.teacher_a && init.teacher_b))
    throw ConfigError("distilled fine-tuning needs both teacher encoders");
  if (bona.empty() && spoof.empty())
    throw ConfigError("fine-tuning training set is empty");
  if (dev.empty()) throw ConfigError("dev set is empty");
  std::set<std::string> train_ids;
  for (const auto &e : bona.entries) train_ids.insert(e.id);
  for (const auto &e : spoof.entries) train_ids.insert(e.id);
  for (const auto &e : dev.entries)
    if (train_ids.count(e.id))
      throw ConfigError("dev utterance '" + e.id + "' is also in training");

  const std::vector<Waveform> bona_w = LoadAll(bona), spoof_w = LoadAll(spoof);
  std::vector<Waveform> dev_w = LoadAll(dev);
  std::vector<Label> dev_labels;
  for (const auto &e : dev.entries) dev_labels.push_back(e.label);
  for (const auto &w : dev_w) ValidateEncoderInput(w.samples, w.id);

  std::map<std::string, int> bona_index;
  for (size_t i = 0; i < bona_w.size(); ++i) bona_index[bona_w[i].id] = i;
  std::vector<Group> groups;
  std::vector<bool> bona_used(bona_w.size(), false);
  for (size_t s = 0; s < spoof_w.size(); ++s) {
    Group g;
    g.spoof = s;
    const std::string &id = spoof_w[s].id;
    if (id.find("__") != std::string::npos) {
      auto it = bona_index.find(SplitVocodedId(id).first);
      if (it != bona_index.end()) {
        g.bona = it->second;
        bona_used[it->second] = true;
      }
    }
    groups.push_back(g);
  }
  for (size_t b = 0; b < bona_w.size(); ++b)
    if (!bona_used[b]) groups.push_back({static_cast<int>(b), -1});
  if (cfg.lambda_cf > 0 && !cfg.aug_enabled)
    Warn("lambda_cf > 0 without augmentation: no view has a positive, "
         "the contrastive term is skipped");

  FinetuneResult result{init, {}};
  CMModel model = init;
  Adam adam_enc(cfg.beta1, cfg.beta2, cfg.eps_adam);
  Adam adam_be(cfg.beta1, cfg.beta2, cfg.eps_adam);
  EarlyStopper stopper(cfg.patience);
  const size_t per_epoch =
      cfg.batches_per_epoch > 0
          ? static_cast<size_t>(cfg.batches_per_epoch) * cfg.batch_size
          : groups.size();

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Rng rng(DeriveSeed(cfg.seed, 1000 + epoch));
    std::vector<size_t> order(groups.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(order);
    std::vector<size_t> picked;
    for (size_t i = 0; i < per_epoch; ++i) {
      if (i > 0 && i % order.size() == 0) rng.Shuffle(order);
      picked.push_back(order[i % order.size()]);
    }
    const double lr = LearningRate(cfg, epoch);
    double sum_total = 0, sum_ce = 0, sum_cf = 0, sum_dis = 0;
    int n_batches = 0;
    for (size_t start = 0; start < picked.size(); start += cfg.batch_size) {
      const size_t end = std::min(picked.size(), start + cfg.batch_size);
      std::vector<BatchView> views;
      std::string ids;
      for (size_t i = start; i < end; ++i) {
        const Group &g = groups[picked[i]];
        const bool paired = g.bona >= 0 && g.spoof >= 0;
        if (g.bona >= 0) {
          AddViews(bona_w[g.bona], Label::kBonafide, ViewClass::kBona, paired,
                   cfg, rng, views);
          ids += " " + bona_w[g.bona].id;
        }
        if (g.spoof >= 0) {
          AddViews(spoof_w[g.spoof], Label::kSpoof, ViewClass::kVoc, paired,
                   cfg, rng, views);
          ids += " " + spoof_w[g.spoof].id;
        }
      }
      ad::Tape tape;
      const BoundCm bound = BindCm(tape, model, true);
      const LossParts parts = BatchLoss(model, bound, views, cfg);
      const double total = parts.total.scalar();
      if (!std::isfinite(total))
        throw NumericError("non-finite fine-tuning loss at epoch " +
                           std::to_string(epoch) + " batch " +
                           std::to_string(n_batches) + " (ce=" + Fmt(parts.ce) +
                           " cf=" + Fmt(parts.cf) + " dis=" + Fmt(parts.dis) +
                           "; utterances:" + ids + ")");
      tape.Backward(parts.total);
      adam_enc.Step(model.encoder.arrays, bound.encoder.Grads(), lr);
      adam_be.Step(model.backend.arrays, bound.backend.Grads(), lr);
      sum_total += total;
      sum_ce += parts.ce;
      sum_cf += parts.cf;
      sum_dis += parts.dis;
      ++n_batches;
    }
    const double dev_loss = DevLoss(model, dev_w, dev_labels);
    if (!std::isfinite(dev_loss))
      throw NumericError("non-finite dev loss at epoch " +
                         std::to_string(epoch));
    const bool stop = stopper.Update(epoch, dev_loss);
    if (stopper.improved()) result.model = model;
    const double nb = std::max(n_batches, 1);
    result.report.epochs.push_back({epoch, lr, sum_total / nb, sum_ce / nb,
                                    sum_cf / nb, sum_dis / nb, dev_loss});
    result.report.stopped_epoch = epoch;
    if (stop) break;
  }
  result.report.best_epoch = stopper.best_epoch();
  return result;
}

void WriteFinetuneReport(const std::string &path, const FinetuneReport &r) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "epoch\tlr\ttrain_loss\tce\tcf\tdis\tdev_loss\n";
  for (const auto &e : r.epochs)
    os << e.epoch << '\t' << Fmt(e.lr) << '\t' << Fmt(e.train_loss) << '\t'
       << Fmt(e.ce) << '\t' << Fmt(e.cf) << '\t' << Fmt(e.dis) << '\t'
       << Fmt(e.dev_loss) << '\n';
  os << "# best_epoch " << r.best_epoch << '\n';
  os << "# stopped_epoch " << r.stopped_epoch << '\n';
  if (!os) throw IoError("write failed: " + path);
}

namespace {

void PutEncoder(Checkpoint &ck, const std::string &prefix,
                const EncoderParams &p) {
  const Checkpoint sub = EncoderToCheckpoint(p);
  for (const auto &[k, v] : sub.metadata) ck.metadata[prefix + k] = v;
  for (const auto &[k, v] : sub.arrays) ck.arrays[prefix + k] = v;
}

bool HasPrefix(const std::string &s, const std::string &p) {
  return s.compare(0, p.size(), p) == 0;
}

Checkpoint SubCheckpoint(const Checkpoint &ck, const std::string &prefix) {
  Checkpoint sub;
  for (const auto &[k, v] : ck.metadata)
    if (HasPrefix(k, prefix)) sub.metadata[k.substr(prefix.size())] = v;
  for (const auto &[k, v] : ck.arrays)
    if (HasPrefix(k, prefix)) sub.arrays[k.substr(prefix.size())] = v;
  return sub;
}

}  // namespace

void SaveCm(const std::string &path, const CMModel &model) {
  model.Validate();
  Checkpoint ck;
  ck.metadata["kind"] = "cm";
  ck.metadata["mode"] = CmModeName(model.mode);
  ck.metadata["backend_dim"] = std::to_string(model.backend.dim);
  if (model.mode == CmMode::kDistilled) {
    ck.metadata["distill.lambda_dis"] = Fmt(model.distill.lambda_dis);
    ck.metadata["distill.target"] = DistillTargetName(model.distill.target);
    ck.metadata["distill.student_init"] =
        StudentInitName(model.distill.student_init);
    ck.metadata["distill.teacher_a_ckpt"] = model.distill.teacher_a_ckpt;
    ck.metadata["distill.teacher_b_ckpt"] = model.distill.teacher_b_ckpt;
  }
  PutEncoder(ck, "encoder.", model.encoder);
  if (model.encoder_b) PutEncoder(ck, "encoder_b.", *model.encoder_b);
  for (const auto &[k, v] : model.backend.arrays) ck.arrays["backend." + k] = v;
  WriteCheckpoint(path, ck);
}

CMModel LoadCm(const std::string &path) {
  const Checkpoint ck = ReadCheckpoint(path);
  if (RequireMeta(ck, "kind", path) != "cm")
    throw ConfigError(path + " is not a CM checkpoint");
  CMModel m;
  m.mode = ParseCmMode(RequireMeta(ck, "mode", path));
  m.encoder = EncoderFromCheckpoint(SubCheckpoint(ck, "encoder."), path);
  if (m.mode == CmMode::kDualDiff)
    m.encoder_b = EncoderFromCheckpoint(SubCheckpoint(ck, "encoder_b."), path);
  if (m.mode == CmMode::kDistilled) {
    m.distill.lambda_dis =
        std::stod(RequireMeta(ck, "distill.lambda_dis", path));
    m.distill.target =
        ParseDistillTarget(RequireMeta(ck, "distill.target", path));
    m.distill.student_init =
        ParseStudentInit(RequireMeta(ck, "distill.student_init", path));
    m.distill.teacher_a_ckpt = RequireMeta(ck, "distill.teacher_a_ckpt", path);
    m.distill.teacher_b_ckpt = RequireMeta(ck, "distill.teacher_b_ckpt", path);
  }
  m.backend.dim = std::stoi(RequireMeta(ck, "backend_dim", path));
  const Checkpoint be = SubCheckpoint(ck, "backend.");
  m.backend.arrays = be.arrays;
  const BackendParams ref = InitBackend(m.backend.dim, 0);
  for (const auto &[k, v] : ref.arrays) {
    auto it = m.backend.arrays.find(k);
    if (it == m.backend.arrays.end() || it->second.rows() != v.rows() ||
        it->second.cols() != v.cols())
      throw ConfigError(path + ": back-end array '" + k +
                        "' missing or misshaped");
  }
  m.Validate();
  return m;
}

}  // namespace voclab
