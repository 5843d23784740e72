// voclab/pipeline.h

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

#ifndef VOCLAB_PIPELINE_H_
#define VOCLAB_PIPELINE_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "voclab/cm.h"
#include "voclab/corpus.h"
#include "voclab/ssl-train.h"

namespace voclab {

/**
   Flat `key = value` experiment configuration.  Every key has a default and
   is validated when set; unknown keys are a ConfigError.  `distill.lambda`
   and `train.lambda_dis` name the same weight: setting either sets both, and
   a config text that gives them different values is rejected.

   Encoder bindings (`cm.encoder`, `cm.encoder_b`, `distill.teacher_a`,
   `distill.teacher_b`, `analysis.enc_a`, `analysis.enc_b`) take one of the
   pipeline's encoders, `ssl_a` (pretrained), `ssl_b` (pretrained on the
   second corpus) or `ssl_a_cont` (ssl_a after continual training), or a
   checkpoint path.  `cm.encoder_b` may also be `none`.
*/
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig Parse(const std::string &text,
                                const std::string &origin = "<text>");
  static ExperimentConfig Load(const std::string &path);

  void Set(const std::string &key, const std::string &value);
  // "key=value"
  void ApplyOverride(const std::string &assignment);

  const std::string &Get(const std::string &key) const;
  int GetInt(const std::string &key) const;
  uint64_t GetU64(const std::string &key) const;
  double GetDouble(const std::string &key) const;
  bool GetBool(const std::string &key) const;
  std::vector<std::string> GetList(const std::string &key) const;

  // All keys, sorted, one `key = value` line each.
  std::string Serialize() const;
  static const std::vector<std::string> &Keys();

  bool operator==(const ExperimentConfig &o) const {
    return values_ == o.values_;
  }

  // Typed views.
  EncoderConfig Encoder() const;
  SslTrainConfig Pretraining() const;
  SslTrainConfig Continual() const;
  TrainConfig Training() const;
  DistillConfig Distill() const;
  std::vector<uint64_t> RoundSeeds() const;

 private:
  std::map<std::string, std::string> values_;
};

// Known preset names in display order.
const std::vector<std::string> &PresetNames();
// Sets `preset` and every front-end / fine-tuning-corpus key of the preset.
void ApplyPreset(ExperimentConfig &cfg, const std::string &name);

enum class Stage {
  kSynth,
  kFeatures,
  kVocode,
  kPretrain,
  kContinual,
  kFinetune,
  kScore,
  kEer,
  kHistogram,
  kTrajectory,
};

const std::vector<Stage> &AllStages();
std::string StageName(Stage s);
Stage ParseStage(const std::string &s);

// An upstream artifact is missing; the message names the stage to run.
class DependencyError : public std::runtime_error {
 public:
  DependencyError(const std::string &stage, const std::string &artifact)
      : std::runtime_error("missing artifact " + artifact + ": run stage '" +
                           stage + "' first"),
        required_stage(stage) {}
  std::string required_stage;
};

struct StageSummary {
  Stage stage;
  uint64_t seed = 0;
  // Paths relative to <run-dir>/<preset>.
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
};

// `key = value` lines: stage, seed, inputs, outputs, wall_time_s (lists are
// comma-separated).
std::string FormatSummary(const StageSummary &s);
StageSummary ParseSummary(const std::string &text);

// <run_dir>/<preset>/<stage>
std::string StageDir(const ExperimentConfig &cfg, const std::string &run_dir,
                     Stage s);

// Runs exactly one stage.  The stage directory is recreated, so a rerun with
// identical config and seed reproduces every primary artifact byte for byte.
StageSummary RunStage(Stage s, const ExperimentConfig &cfg,
                      const std::string &run_dir);

// Stages run for a preset, in order.
std::vector<Stage> PresetStages(const ExperimentConfig &cfg);

// Applies the preset on top of `base`, runs its stages and returns the
// multi-round EER report text.
std::string RunPreset(const std::string &name, const ExperimentConfig &base,
                      const std::string &run_dir,
                      const std::vector<std::string> &overrides = {});

}  // namespace voclab

#endif  // VOCLAB_PIPELINE_H_
