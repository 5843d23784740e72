// voclab/ssl-train.h

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

#ifndef VOCLAB_SSL_TRAIN_H_
#define VOCLAB_SSL_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "voclab/manifest.h"
#include "voclab/ssl-encoder.h"

namespace voclab {

struct MaskConfig {
  int span_len = 5;
  double mask_fraction = 0.5;
};

/**
   Seeded span mask over `num_frames` frames.  round(mask_fraction * N /
   span_len) span starts are drawn uniformly from [0, N - span_len] (spans may
   overlap).  Throws InputError when no frame would be masked.
*/
std::vector<bool> SpanMask(int num_frames, const MaskConfig &cfg,
                           uint64_t seed);

/**
   Masked-span regression loss: mean absolute error, over masked frames and
   all D dimensions, between the encoder output computed with masked inputs
   and the pre-mask conv features.  The target is detached from the graph.
*/
double SslPretrainLoss(const EncoderParams &params, const Waveform &w,
                       const MaskConfig &mask_cfg, uint64_t seed);

// Same loss with an explicit (fixed) target; builds the graph on `bound`'s
// tape and returns the scalar node.  `target` empty means "use the conv
// features of this pass, detached".
ad::Var SslLossGraph(const EncoderConfig &cfg, const BoundParams &bound,
                     const std::vector<double> &samples,
                     const std::vector<bool> &mask,
                     const Matrix *target = nullptr);

struct SslTrainConfig {
  int epochs = 20;
  int batch_size = 8;
  double lr = 1e-3;
  MaskConfig mask;
  // Utterances longer than this are randomly cropped (seeded).
  double max_trunc_s = 4.0;
};

struct EpochLog {
  int epoch;
  double mean_loss;
  double lr;
};

struct SslTrainResult {
  EncoderParams params;
  std::vector<EpochLog> log;
  // Loss of every optimizer step, in order.
  std::vector<double> step_losses;
};

// Optimises SslPretrainLoss with Adam from a fresh seeded init.  Throws
// NumericError naming the batch on a non-finite loss.
SslTrainResult Pretrain(const Manifest &manifest, const EncoderConfig &enc_cfg,
                        const SslTrainConfig &cfg, uint64_t seed);

// Same objective, initialised from `init`; all parameters are updated.
SslTrainResult ContinualTrain(const EncoderParams &init,
                              const Manifest &vocoded,
                              const SslTrainConfig &cfg, uint64_t seed);

// Shared loop over in-memory waveforms.
SslTrainResult TrainSsl(EncoderParams init, const std::vector<Waveform> &data,
                        const SslTrainConfig &cfg, uint64_t seed,
                        const std::string &stage);

// Mean SslPretrainLoss over waveforms with per-utterance derived seeds.
double MeanSslLoss(const EncoderParams &params,
                   const std::vector<Waveform> &data, const MaskConfig &mask,
                   uint64_t seed);

// `epoch  mean_loss  lr` lines, tab-separated.
void WriteTrainingLog(const std::string &path,
                      const std::vector<EpochLog> &log);

std::vector<Waveform> LoadAll(const Manifest &m);

}  // namespace voclab

#endif  // VOCLAB_SSL_TRAIN_H_
