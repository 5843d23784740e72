// ssl-train.cc

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

#include "voclab/ssl-train.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "voclab/errors.h"
#include "voclab/rng.h"

namespace voclab {

std::vector<bool> SpanMask(int num_frames, const MaskConfig &cfg,
                           uint64_t seed) {
  if (cfg.span_len < 1) throw ConfigError("mask span_len must be >= 1");
  if (!(cfg.mask_fraction > 0.0 && cfg.mask_fraction <= 1.0))
    throw ConfigError("mask_fraction must lie in (0, 1]");
  const int n_spans = static_cast<int>(
      std::lround(cfg.mask_fraction * num_frames / cfg.span_len));
  if (num_frames < 1 || n_spans < 1)
    throw InputError("span mask selects no frames for " +
                     std::to_string(num_frames) +
                     " frames (utterance too short)");
  Rng rng(seed);
  std::vector<bool> mask(num_frames, false);
  const int span = std::min(cfg.span_len, num_frames);
  const int n_starts = num_frames - span + 1;
  for (int s = 0; s < n_spans; ++s) {
    const int start = static_cast<int>(rng.UniformInt(n_starts));
    for (int i = start; i < start + span; ++i) mask[i] = true;
  }
  return mask;
}

ad::Var SslLossGraph(const EncoderConfig &cfg, const BoundParams &bound,
                     const std::vector<double> &samples,
                     const std::vector<bool> &mask, const Matrix *target) {
  const EncoderTrace tr = EncoderForward(cfg, bound, samples, &mask);
  ad::Tape &tape = *tr.output.tape;
  const ad::Var tgt =
      tape.Constant(target ? *target : tr.conv_features.value());
  const Eigen::Index n = tr.output.rows(), d = tr.output.cols();
  Matrix weights = Matrix::Zero(n, d);
  int masked = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask[i]) ++masked;
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask[i]) weights.row(i).setConstant(1.0 / (masked * d));
  return ad::WeightedSum(ad::Abs(ad::Sub(tr.output, tgt)), weights);
}

double SslPretrainLoss(const EncoderParams &params, const Waveform &w,
                       const MaskConfig &mask_cfg, uint64_t seed) {
  ValidateEncoderInput(w.samples, w.id);
  const int n = EncoderFrames(params.config, w.samples.size());
  const std::vector<bool> mask = SpanMask(n, mask_cfg, seed);
  ad::Tape tape;
  BoundParams bound(tape, params.arrays, false);
  return SslLossGraph(params.config, bound, w.samples, mask).scalar();
}

double MeanSslLoss(const EncoderParams &params,
                   const std::vector<Waveform> &data, const MaskConfig &mask,
                   uint64_t seed) {
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i)
    total += SslPretrainLoss(params, data[i], mask, DeriveSeed(seed, i));
  return data.empty() ? 0.0 : total / data.size();
}

namespace {

std::vector<double> RandomCrop(const std::vector<double> &x, size_t max_len,
                               Rng &rng) {
  if (x.size() <= max_len) return x;
  const size_t start = rng.UniformInt(x.size() - max_len + 1);
  return std::vector<double>(x.begin() + start, x.begin() + start + max_len);
}

}  // namespace

SslTrainResult TrainSsl(EncoderParams init, const std::vector<Waveform> &data,
                        const SslTrainConfig &cfg, uint64_t seed,
                        const std::string &stage) {
  if (data.empty()) throw ConfigError("SSL training manifest is empty");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.lr > 0))
    throw ConfigError("SSL training needs epochs >= 0, batch_size >= 1, lr > 0");
  SslTrainResult res;
  res.params = std::move(init);
  if (cfg.epochs == 0) return res;
  res.params.stage = stage;

  Adam adam;
  Rng order_rng(DeriveSeed(seed, 1));
  const size_t max_len = static_cast<size_t>(cfg.max_trunc_s * kSampleRate);
  std::vector<size_t> order(data.size());
  long batch_id = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    order_rng.Shuffle(order);
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      ad::Tape tape;
      BoundParams bound(tape, res.params.arrays, true);
      std::vector<ad::Var> losses;
      for (size_t j = start; j < end; ++j) {
        const std::vector<double> x =
            RandomCrop(data[order[j]].samples, max_len, order_rng);
        const int n = EncoderFrames(res.params.config, x.size());
        const std::vector<bool> mask =
            SpanMask(n, cfg.mask, DeriveSeed(seed, 1000003ULL * batch_id + j));
        losses.push_back(SslLossGraph(res.params.config, bound, x, mask));
      }
      const ad::Var loss = ad::Mean(ad::ConcatRows(losses));
      if (!std::isfinite(loss.scalar()))
        throw NumericError("non-finite SSL loss in epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_id));
      tape.Backward(loss);
      adam.Step(res.params.arrays, bound.Grads(), cfg.lr);
      res.step_losses.push_back(loss.scalar());
      epoch_loss += loss.scalar();
      ++n_batches;
      ++batch_id;
    }
    res.log.push_back({epoch, epoch_loss / n_batches, cfg.lr});
  }
  return res;
}

std::vector<Waveform> LoadAll(const Manifest &m) {
  std::vector<Waveform> out;
  out.reserve(m.size());
  for (const auto &e : m.entries) out.push_back(m.Load(e));
  return out;
}

SslTrainResult Pretrain(const Manifest &manifest, const EncoderConfig &enc_cfg,
                        const SslTrainConfig &cfg, uint64_t seed) {
  if (manifest.empty()) throw ConfigError("pretraining manifest is empty");
  return TrainSsl(InitEncoder(enc_cfg, DeriveSeed(seed, 0)), LoadAll(manifest),
                  cfg, seed, "pretrain");
}

SslTrainResult ContinualTrain(const EncoderParams &init,
                              const Manifest &vocoded,
                              const SslTrainConfig &cfg, uint64_t seed) {
  if (vocoded.empty()) throw ConfigError("continual-training manifest is empty");
  ValidateEncoderParams(init);
  return TrainSsl(init, LoadAll(vocoded), cfg, seed, "continual");
}

void WriteTrainingLog(const std::string &path,
                      const std::vector<EpochLog> &log) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open training log " + path);
  char buf[128];
  for (const auto &e : log) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\n", e.epoch, e.mean_loss,
                  e.lr);
    os << buf;
  }
}

}  // namespace voclab
