// ssl-encoder.cc

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

#include "voclab/ssl-encoder.h"

#include <cmath>
#include <sstream>

#include "voclab/errors.h"
#include "voclab/rng.h"

namespace voclab {

namespace {

std::string Key(const std::string &a, int i, const std::string &b) {
  return a + "." + std::to_string(i) + "." + b;
}

Matrix RandomMatrix(Rng &rng, int rows, int cols, double stddev) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.Normal();
  return m;
}

ad::Var Affine(ad::Var x, ad::Var w, ad::Var b) {
  return ad::AddRow(ad::MatMul(x, w), b);
}

ad::Var Norm(ad::Var x, ad::Var scale, ad::Var offset, double eps) {
  return ad::AddRow(ad::MulRow(ad::LayerNormRows(x, eps), scale), offset);
}

std::string ScheduleString(const std::vector<ConvLayerSpec> &conv) {
  std::ostringstream os;
  for (size_t i = 0; i < conv.size(); ++i)
    os << (i ? "," : "") << conv[i].kernel << "x" << conv[i].stride;
  return os.str();
}

std::vector<ConvLayerSpec> ParseSchedule(const std::string &s) {
  std::vector<ConvLayerSpec> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const size_t x = tok.find('x');
    if (x == std::string::npos) throw ConfigError("bad conv schedule " + s);
    out.push_back({std::stoi(tok.substr(0, x)), std::stoi(tok.substr(x + 1))});
  }
  return out;
}

}  // namespace

void EncoderConfig::Validate() const {
  if (dim < 2) throw ConfigError("encoder dim must be >= 2");
  if (depth < 1) throw ConfigError("encoder depth must be >= 1");
  if (heads < 1 || dim % heads != 0)
    throw ConfigError("encoder heads must divide dim");
  if (ffn_dim < 1 || conv_channels < 1)
    throw ConfigError("encoder ffn_dim and conv_channels must be positive");
  if (conv.empty()) throw ConfigError("encoder conv schedule is empty");
  for (const auto &c : conv)
    if (c.stride < 1 || c.kernel < c.stride)
      throw ConfigError("conv layers need kernel >= stride >= 1");
  if (pos_kernel < 1 || pos_kernel % 2 == 0)
    throw ConfigError("pos_kernel must be odd");
}

int EncoderConfig::TotalStride() const {
  int s = 1;
  for (const auto &c : conv) s *= c.stride;
  return s;
}

bool EncoderConfig::operator==(const EncoderConfig &o) const {
  if (conv.size() != o.conv.size()) return false;
  for (size_t i = 0; i < conv.size(); ++i)
    if (conv[i].kernel != o.conv[i].kernel || conv[i].stride != o.conv[i].stride)
      return false;
  return dim == o.dim && depth == o.depth && heads == o.heads &&
         ffn_dim == o.ffn_dim && conv_channels == o.conv_channels &&
         pos_kernel == o.pos_kernel && ln_eps == o.ln_eps;
}

EncoderParams InitEncoder(const EncoderConfig &cfg, uint64_t seed) {
  cfg.Validate();
  Rng rng(seed);
  EncoderParams p;
  p.config = cfg;
  ParamMap &a = p.arrays;
  const int d = cfg.dim, c = cfg.conv_channels;
  int in_ch = 1;
  for (size_t i = 0; i < cfg.conv.size(); ++i) {
    const int fan_in = cfg.conv[i].kernel * in_ch;
    a[Key("conv", i, "weight")] =
        RandomMatrix(rng, fan_in, c, 1.0 / std::sqrt(fan_in));
    a[Key("conv", i, "bias")] = Matrix::Zero(1, c);
    in_ch = c;
  }
  a["feat_norm.scale"] = Matrix::Ones(1, c);
  a["feat_norm.offset"] = Matrix::Zero(1, c);
  a["proj.weight"] = RandomMatrix(rng, c, d, 1.0 / std::sqrt(c));
  a["proj.bias"] = Matrix::Zero(1, d);
  a["pos.weight"] = RandomMatrix(rng, cfg.pos_kernel * d, d,
                                 0.5 / std::sqrt(cfg.pos_kernel * d));
  a["pos.bias"] = Matrix::Zero(1, d);
  for (int b = 0; b < cfg.depth; ++b) {
    for (const char *ln : {"ln1", "ln2"}) {
      a[Key("block", b, std::string(ln) + ".scale")] = Matrix::Ones(1, d);
      a[Key("block", b, std::string(ln) + ".offset")] = Matrix::Zero(1, d);
    }
    for (const char *w : {"wq", "wk", "wv", "wo"})
      a[Key("block", b, std::string("attn.") + w)] =
          RandomMatrix(rng, d, d, 1.0 / std::sqrt(d));
    for (const char *bias : {"bq", "bk", "bv", "bo"})
      a[Key("block", b, std::string("attn.") + bias)] = Matrix::Zero(1, d);
    a[Key("block", b, "ffn.w1")] =
        RandomMatrix(rng, d, cfg.ffn_dim, 1.0 / std::sqrt(d));
    a[Key("block", b, "ffn.b1")] = Matrix::Zero(1, cfg.ffn_dim);
    a[Key("block", b, "ffn.w2")] =
        RandomMatrix(rng, cfg.ffn_dim, d, 1.0 / std::sqrt(cfg.ffn_dim));
    a[Key("block", b, "ffn.b2")] = Matrix::Zero(1, d);
  }
  a["final_norm.scale"] = Matrix::Ones(1, d);
  a["final_norm.offset"] = Matrix::Zero(1, d);
  a["mask_embedding"] = RandomMatrix(rng, 1, d, 1.0);
  return p;
}

int EncoderFrames(const EncoderConfig &cfg, size_t num_samples) {
  size_t n = num_samples;
  for (const auto &c : cfg.conv) n /= static_cast<size_t>(c.stride);
  return static_cast<int>(n);
}

void ValidateEncoderInput(const std::vector<double> &samples,
                          const std::string &id) {
  if (samples.size() < kMinEncoderSamples)
    throw InputError("waveform " + id + " has " +
                     std::to_string(samples.size()) +
                     " samples; the encoder needs at least " +
                     std::to_string(kMinEncoderSamples));
}

EncoderTrace EncoderForward(const EncoderConfig &cfg, const BoundParams &p,
                            const std::vector<double> &samples,
                            const std::vector<bool> *mask) {
  ValidateEncoderInput(samples, "");
  ad::Tape &tape = *p["proj.weight"].tape;
  Matrix wave(static_cast<Eigen::Index>(samples.size()), 1);
  for (size_t i = 0; i < samples.size(); ++i) wave(i, 0) = samples[i];
  ad::Var h = tape.Constant(std::move(wave));
  for (size_t i = 0; i < cfg.conv.size(); ++i) {
    const int k = cfg.conv[i].kernel, s = cfg.conv[i].stride;
    const int pad_left = (k - s) / 2;
    const ad::Var cols = ad::Im2Col(h, k, s, pad_left, k - s - pad_left);
    h = ad::Gelu(Affine(cols, p[Key("conv", i, "weight")],
                        p[Key("conv", i, "bias")]));
  }
  h = Norm(h, p["feat_norm.scale"], p["feat_norm.offset"], cfg.ln_eps);
  EncoderTrace trace;
  trace.conv_features = Affine(h, p["proj.weight"], p["proj.bias"]);

  ad::Var x = trace.conv_features;
  if (mask != nullptr) x = ad::ReplaceRows(x, p["mask_embedding"], *mask);
  const int pad = cfg.pos_kernel / 2;
  x = ad::Add(x, ad::Gelu(Affine(ad::Im2Col(x, cfg.pos_kernel, 1, pad, pad),
                                 p["pos.weight"], p["pos.bias"])));

  const int dh = cfg.dim / cfg.heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int b = 0; b < cfg.depth; ++b) {
    auto P = [&](const std::string &name) { return p[Key("block", b, name)]; };
    const ad::Var a = Norm(x, P("ln1.scale"), P("ln1.offset"), cfg.ln_eps);
    const ad::Var q = Affine(a, P("attn.wq"), P("attn.bq"));
    const ad::Var kk = Affine(a, P("attn.wk"), P("attn.bk"));
    const ad::Var v = Affine(a, P("attn.wv"), P("attn.bv"));
    std::vector<ad::Var> heads;
    for (int hd = 0; hd < cfg.heads; ++hd) {
      const ad::Var qh = ad::ColSlice(q, hd * dh, dh);
      const ad::Var kh = ad::ColSlice(kk, hd * dh, dh);
      const ad::Var vh = ad::ColSlice(v, hd * dh, dh);
      const ad::Var att =
          ad::SoftmaxRows(ad::Scale(ad::MatMulTransB(qh, kh), inv_sqrt_dh));
      heads.push_back(ad::MatMul(att, vh));
    }
    const ad::Var attn_out =
        Affine(ad::ConcatCols(heads), P("attn.wo"), P("attn.bo"));
    x = ad::Add(x, attn_out);
    const ad::Var c = Norm(x, P("ln2.scale"), P("ln2.offset"), cfg.ln_eps);
    const ad::Var ff = Affine(ad::Gelu(Affine(c, P("ffn.w1"), P("ffn.b1"))),
                              P("ffn.w2"), P("ffn.b2"));
    x = ad::Add(x, ff);
    trace.hidden.push_back(x);
  }
  trace.output =
      Norm(x, p["final_norm.scale"], p["final_norm.offset"], cfg.ln_eps);
  return trace;
}

FeatureSequence Encode(const EncoderParams &params, const Waveform &w) {
  ValidateEncoderInput(w.samples, w.id);
  ad::Tape tape;
  BoundParams bound(tape, params.arrays, false);
  const EncoderTrace tr = EncoderForward(params.config, bound, w.samples);
  return {w.id, tr.output.value()};
}

std::vector<FeatureSequence> EncodeHidden(const EncoderParams &params,
                                          const Waveform &w) {
  ValidateEncoderInput(w.samples, w.id);
  ad::Tape tape;
  BoundParams bound(tape, params.arrays, false);
  const EncoderTrace tr = EncoderForward(params.config, bound, w.samples);
  std::vector<FeatureSequence> out;
  for (const auto &h : tr.hidden) out.push_back({w.id, h.value()});
  return out;
}

Matrix ApplyFinalNorm(const EncoderParams &params, const Matrix &hidden) {
  ad::Tape tape;
  const ad::Var x = tape.Constant(hidden);
  const ad::Var s = tape.Constant(params.arrays.at("final_norm.scale"));
  const ad::Var o = tape.Constant(params.arrays.at("final_norm.offset"));
  return Norm(x, s, o, params.config.ln_eps).value();
}

void ValidateEncoderParams(const EncoderParams &params) {
  const EncoderParams ref = InitEncoder(params.config, 0);
  if (ref.arrays.size() != params.arrays.size())
    throw InputError("encoder parameter set does not match its config");
  for (const auto &[name, m] : ref.arrays) {
    auto it = params.arrays.find(name);
    if (it == params.arrays.end())
      throw InputError("encoder parameters lack '" + name + "'");
    if (it->second.rows() != m.rows() || it->second.cols() != m.cols())
      throw InputError("encoder parameter '" + name + "' has wrong shape");
    if (!it->second.allFinite())
      throw InputError("encoder parameter '" + name + "' is not finite");
  }
}

Checkpoint EncoderToCheckpoint(const EncoderParams &params) {
  Checkpoint ck;
  const EncoderConfig &c = params.config;
  ck.metadata["kind"] = "encoder";
  ck.metadata["dim"] = std::to_string(c.dim);
  ck.metadata["depth"] = std::to_string(c.depth);
  ck.metadata["heads"] = std::to_string(c.heads);
  ck.metadata["ffn_dim"] = std::to_string(c.ffn_dim);
  ck.metadata["conv_channels"] = std::to_string(c.conv_channels);
  ck.metadata["conv_schedule"] = ScheduleString(c.conv);
  ck.metadata["pos_kernel"] = std::to_string(c.pos_kernel);
  ck.metadata["precision"] = "float64";
  ck.metadata["stage"] = params.stage;
  ck.arrays = params.arrays;
  return ck;
}

EncoderParams EncoderFromCheckpoint(const Checkpoint &ck,
                                    const std::string &path) {
  if (RequireMeta(ck, "precision", path) != "float64")
    throw ConfigError("checkpoint " + path + " has unsupported precision");
  EncoderParams p;
  p.config.dim = std::stoi(RequireMeta(ck, "dim", path));
  p.config.depth = std::stoi(RequireMeta(ck, "depth", path));
  p.config.heads = std::stoi(RequireMeta(ck, "heads", path));
  p.config.ffn_dim = std::stoi(RequireMeta(ck, "ffn_dim", path));
  p.config.conv_channels = std::stoi(RequireMeta(ck, "conv_channels", path));
  p.config.conv = ParseSchedule(RequireMeta(ck, "conv_schedule", path));
  p.config.pos_kernel = std::stoi(RequireMeta(ck, "pos_kernel", path));
  p.config.Validate();
  p.stage = RequireMeta(ck, "stage", path);
  p.arrays = ck.arrays;
  ValidateEncoderParams(p);
  return p;
}

void SaveEncoder(const std::string &path, const EncoderParams &params) {
  WriteCheckpoint(path, EncoderToCheckpoint(params));
}

EncoderParams LoadEncoder(const std::string &path) {
  return EncoderFromCheckpoint(ReadCheckpoint(path), path);
}

}  // namespace voclab
