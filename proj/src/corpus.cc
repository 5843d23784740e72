// corpus.cc

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

#include "voclab/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "voclab/checkpoint.h"
#include "voclab/errors.h"
#include "voclab/rng.h"
#include "voclab/vocoder.h"

namespace voclab {

namespace fs = std::filesystem;

std::string SubsetFor(const CorpusConfig &cfg, int index) {
  const int n_dev = static_cast<int>(std::lround(cfg.dev_fraction * cfg.n_utts));
  const int n_test =
      static_cast<int>(std::lround(cfg.test_fraction * cfg.n_utts));
  const int n_train = cfg.n_utts - n_dev - n_test;
  if (index < n_train) return "train";
  if (index < n_train + n_dev) return "dev";
  return cfg.test_subset;
}

std::string VocodedId(const std::string &source_id,
                      const std::string &vocoder_id) {
  return source_id + "__" + vocoder_id;
}

std::pair<std::string, std::string> SplitVocodedId(const std::string &id) {
  const size_t pos = id.rfind("__");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= id.size())
    throw InputError("'" + id + "' is not a vocoded utterance id");
  return {id.substr(0, pos), id.substr(pos + 2)};
}

uint64_t VocodeSeed(uint64_t corpus_seed, int utt_index, int vocoder_index) {
  return DeriveSeed(DeriveSeed(corpus_seed, 0x766f63ULL + vocoder_index),
                    static_cast<uint64_t>(utt_index));
}

VocoderAssignment ParseVocoderAssignment(const std::string &s) {
  if (s == "all") return VocoderAssignment::kAll;
  if (s == "alternate") return VocoderAssignment::kAlternate;
  throw ConfigError("unknown vocoder assignment '" + s +
                    "' (expected all or alternate)");
}

std::string VocoderAssignmentName(VocoderAssignment a) {
  return a == VocoderAssignment::kAll ? "all" : "alternate";
}

std::vector<int> VocodersFor(size_t n_vocoders, VocoderAssignment a,
                             int utt_index) {
  std::vector<int> out;
  if (n_vocoders == 0) return out;
  if (a == VocoderAssignment::kAlternate) {
    out.push_back(utt_index % static_cast<int>(n_vocoders));
  } else {
    for (size_t v = 0; v < n_vocoders; ++v) out.push_back(static_cast<int>(v));
  }
  return out;
}

namespace {

void MakeWavDir(const std::string &output_dir) {
  std::error_code ec;
  fs::create_directories(fs::path(output_dir) / "wav", ec);
  if (ec)
    throw IoError("cannot create " + output_dir + "/wav: " + ec.message());
}

void CheckVocoders(const std::vector<std::string> &vocoder_ids) {
  for (const auto &v : vocoder_ids)
    if (std::find(KnownVocoders().begin(), KnownVocoders().end(), v) ==
        KnownVocoders().end())
      throw ConfigError("unknown vocoder_id '" + v + "'");
}

}  // namespace

Manifest SynthCorpus(const CorpusConfig &cfg, const std::string &output_dir) {
  cfg.Validate();
  MakeWavDir(output_dir);
  Manifest m;
  m.base_dir = fs::absolute(output_dir).string();
  for (int i = 0; i < cfg.n_utts; ++i) {
    const Waveform w = SynthUtterance(cfg, i);
    const std::string rel = "wav/" + w.id + ".wav";
    WriteWav((fs::path(output_dir) / rel).string(), w);
    m.entries.push_back(
        {w.id, rel, Label::kBonafide, kHumanSource, SubsetFor(cfg, i)});
  }
  WriteManifest((fs::path(output_dir) / "bonafide.tsv").string(), m);
  return m;
}

std::vector<AcousticFeatures> ExtractCorpusFeatures(const Manifest &m) {
  FeatureConfig fcfg;
  fcfg.with_f0 = true;
  std::vector<AcousticFeatures> out;
  out.reserve(m.size());
  for (const auto &e : m.entries) out.push_back(ExtractFeatures(m.Load(e), fcfg));
  return out;
}

void WriteFeatureArchive(const std::string &path,
                         const std::vector<AcousticFeatures> &feats) {
  Checkpoint ck;
  ck.metadata["kind"] = "features";
  ck.metadata["count"] = std::to_string(feats.size());
  for (size_t i = 0; i < feats.size(); ++i) {
    const AcousticFeatures &f = feats[i];
    const std::string key = std::to_string(i);
    ck.metadata[key + ".id"] = f.source_id;
    ck.metadata[key + ".analysis"] =
        std::to_string(f.window) + "," + std::to_string(f.hop) + "," +
        std::to_string(f.n_fft) + "," + std::to_string(f.num_samples);
    ck.arrays[f.source_id + ".mel"] = f.mel;
    Matrix f0(1, f.f0.size());
    for (size_t t = 0; t < f.f0.size(); ++t) f0(0, t) = f.f0[t];
    ck.arrays[f.source_id + ".f0"] = f0;
  }
  WriteCheckpoint(path, ck);
}

std::vector<AcousticFeatures> ReadFeatureArchive(const std::string &path) {
  const Checkpoint ck = ReadCheckpoint(path);
  if (RequireMeta(ck, "kind", path) != "features")
    throw ConfigError(path + " is not a feature archive");
  const size_t n = std::stoul(RequireMeta(ck, "count", path));
  std::vector<AcousticFeatures> out(n);
  for (size_t i = 0; i < n; ++i) {
    const std::string key = std::to_string(i);
    AcousticFeatures &f = out[i];
    f.source_id = RequireMeta(ck, key + ".id", path);
    const std::string &a = RequireMeta(ck, key + ".analysis", path);
    unsigned long long ns = 0;
    if (std::sscanf(a.c_str(), "%d,%d,%d,%llu", &f.window, &f.hop, &f.n_fft,
                    &ns) != 4)
      throw ConfigError(path + ": malformed analysis settings for " +
                        f.source_id);
    f.num_samples = ns;
    f.frame_shift = static_cast<double>(f.hop) / kSampleRate;
    auto mel = ck.arrays.find(f.source_id + ".mel");
    auto f0 = ck.arrays.find(f.source_id + ".f0");
    if (mel == ck.arrays.end() || f0 == ck.arrays.end())
      throw ConfigError(path + ": missing arrays for " + f.source_id);
    f.mel = mel->second;
    f.f0.assign(f0->second.data(), f0->second.data() + f0->second.size());
  }
  return out;
}

Manifest VocodeCorpus(const CorpusConfig &cfg, const Manifest &bonafide,
                      const std::vector<AcousticFeatures> &feats,
                      const std::vector<std::string> &vocoder_ids,
                      VocoderAssignment assign, const std::string &output_dir) {
  CheckVocoders(vocoder_ids);
  if (feats.size() != bonafide.size())
    throw InputError("feature count does not match the bona fide manifest");
  MakeWavDir(output_dir);
  Manifest m;
  m.base_dir = fs::absolute(output_dir).string();
  for (size_t i = 0; i < feats.size(); ++i) {
    const ManifestEntry &src = bonafide.entries[i];
    if (feats[i].source_id != src.id)
      throw InputError("feature archive order does not match manifest at " +
                       src.id);
    for (int v : VocodersFor(vocoder_ids.size(), assign, static_cast<int>(i))) {
      Waveform voc = Vocode(feats[i], vocoder_ids[v],
                            VocodeSeed(cfg.seed, static_cast<int>(i), v));
      voc.id = VocodedId(src.id, vocoder_ids[v]);
      const std::string rel = "wav/" + voc.id + ".wav";
      WriteWav((fs::path(output_dir) / rel).string(), voc);
      m.entries.push_back({voc.id, rel, Label::kSpoof, vocoder_ids[v],
                           src.subset});
    }
  }
  WriteManifest((fs::path(output_dir) / "vocoded.tsv").string(), m);
  return m;
}

CorpusManifests BuildCorpus(const CorpusConfig &cfg,
                            const std::vector<std::string> &vocoder_ids,
                            const std::string &output_dir,
                            VocoderAssignment assign) {
  cfg.Validate();
  CheckVocoders(vocoder_ids);
  CorpusManifests out;
  out.bonafide = SynthCorpus(cfg, output_dir);
  out.vocoded = VocodeCorpus(cfg, out.bonafide,
                             ExtractCorpusFeatures(out.bonafide), vocoder_ids,
                             assign, output_dir);
  return out;
}

}  // namespace voclab
