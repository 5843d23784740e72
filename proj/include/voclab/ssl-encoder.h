// voclab/ssl-encoder.h

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

#ifndef VOCLAB_SSL_ENCODER_H_
#define VOCLAB_SSL_ENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "voclab/autograd.h"
#include "voclab/checkpoint.h"
#include "voclab/params.h"
#include "voclab/wav-io.h"

namespace voclab {

struct ConvLayerSpec {
  int kernel;
  int stride;
};

struct EncoderConfig {
  int dim = 64;
  int depth = 2;
  int heads = 4;
  int ffn_dim = 256;
  int conv_channels = 32;
  // Total stride 320 (50 frames/s).  Each layer pads (kernel - stride)
  // samples split evenly, with the odd sample on the right, so a layer maps
  // L inputs to floor(L / stride) outputs.
  std::vector<ConvLayerSpec> conv = {{10, 5}, {8, 4}, {8, 4}, {4, 4}};
  int pos_kernel = 3;
  double ln_eps = 1e-5;

  void Validate() const;
  int TotalStride() const;
  bool operator==(const EncoderConfig &o) const;
};

inline constexpr size_t kMinEncoderSamples = 400;

// Named arrays of the encoder:
//   conv.<i>.weight (K*Cin x C), conv.<i>.bias, feat_norm.scale/offset,
//   proj.weight (C x D), proj.bias, pos.weight (K*D x D), pos.bias,
//   block.<b>.{ln1,ln2}.{scale,offset}, block.<b>.attn.{wq,wk,wv,wo,bq,bk,
//   bv,bo}, block.<b>.ffn.{w1,b1,w2,b2}, final_norm.scale/offset,
//   mask_embedding (1 x D).
struct EncoderParams {
  EncoderConfig config;
  ParamMap arrays;
  std::string stage = "init";
};

EncoderParams InitEncoder(const EncoderConfig &cfg, uint64_t seed);

// A D-dimensional feature sequence (N x D) for one utterance.
struct FeatureSequence {
  std::string id;
  Matrix values;
};

// Graph-level outputs of one forward pass.
struct EncoderTrace {
  ad::Var conv_features;        // N x D, input to the transformer
  std::vector<ad::Var> hidden;  // per transformer block
  ad::Var output;               // final layer normalisation
};

// Number of output frames for a waveform of `num_samples`: floor(n / 320)
// under the default schedule.  Depends on the length only.
int EncoderFrames(const EncoderConfig &cfg, size_t num_samples);

// Builds the forward graph on the tape of `bound`.  Rows with mask[i] set are
// replaced by the mask embedding before the transformer.
EncoderTrace EncoderForward(const EncoderConfig &cfg, const BoundParams &bound,
                            const std::vector<double> &samples,
                            const std::vector<bool> *mask = nullptr);

// Inference helpers.
FeatureSequence Encode(const EncoderParams &params, const Waveform &w);
std::vector<FeatureSequence> EncodeHidden(const EncoderParams &params,
                                          const Waveform &w);
// Applies the (affine) final normalisation of `params` to a hidden sequence.
Matrix ApplyFinalNorm(const EncoderParams &params, const Matrix &hidden);

void ValidateEncoderInput(const std::vector<double> &samples,
                          const std::string &id);

// Checkpoint mapping; metadata carries dim, depth, heads, ffn_dim,
// conv_channels, conv_schedule, pos_kernel, precision and stage.
Checkpoint EncoderToCheckpoint(const EncoderParams &params);
EncoderParams EncoderFromCheckpoint(const Checkpoint &ckpt,
                                    const std::string &path = "");
void SaveEncoder(const std::string &path, const EncoderParams &params);
EncoderParams LoadEncoder(const std::string &path);

// Checks the arrays have the shapes implied by the config.
void ValidateEncoderParams(const EncoderParams &params);

}  // namespace voclab

#endif  // VOCLAB_SSL_ENCODER_H_
