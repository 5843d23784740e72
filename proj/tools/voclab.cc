// voclab.cc

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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "voclab/errors.h"
#include "voclab/pipeline.h"

namespace {

struct CommonOptions {
  std::string config;
  std::string run_dir = "runs";
  std::vector<std::string> overrides;
  long long seed = -1;
};

void AddCommon(CLI::App *cmd, CommonOptions &o) {
  cmd->add_option("--config", o.config, "Experiment config file (key = value)");
  cmd->add_option("--run-dir", o.run_dir, "Root of the run directory")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Global seed (overrides the config)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--override", o.overrides, "key=value, repeatable")
      ->allow_extra_args(false);
}

voclab::ExperimentConfig BaseConfig(const CommonOptions &o) {
  return o.config.empty() ? voclab::ExperimentConfig()
                          : voclab::ExperimentConfig::Load(o.config);
}

std::vector<std::string> Overrides(const CommonOptions &o) {
  std::vector<std::string> v = o.overrides;
  if (o.seed >= 0) v.push_back("seed=" + std::to_string(o.seed));
  return v;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"voclab: vocoded-data spoofing countermeasure laboratory"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string stage_name;
  for (voclab::Stage s : voclab::AllStages()) {
    const std::string name = voclab::StageName(s);
    CLI::App *cmd = app.add_subcommand(name, "Run the " + name + " stage");
    AddCommon(cmd, common);
    cmd->callback([&stage_name, name] { stage_name = name; });
  }

  CLI::App *preset = app.add_subcommand("preset", "Experiment presets");
  preset->require_subcommand(1);
  std::string preset_name;
  CLI::App *run = preset->add_subcommand("run", "Run every stage of a preset");
  run->add_option("name", preset_name, "Preset name")->required();
  AddCommon(run, common);
  CLI::App *show = preset->add_subcommand("show", "Print a preset's config");
  show->add_option("name", preset_name, "Preset name")->required();
  AddCommon(show, common);
  CLI::App *list = preset->add_subcommand("list", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto &n : voclab::PresetNames()) std::cout << n << '\n';
      return 0;
    }
    if (show->parsed()) {
      voclab::ExperimentConfig cfg = BaseConfig(common);
      voclab::ApplyPreset(cfg, preset_name);
      for (const auto &o : Overrides(common)) cfg.ApplyOverride(o);
      std::cout << cfg.Serialize();
      return 0;
    }
    if (run->parsed()) {
      std::cout << voclab::RunPreset(preset_name, BaseConfig(common),
                                     common.run_dir, Overrides(common));
      return 0;
    }
    voclab::ExperimentConfig cfg = BaseConfig(common);
    for (const auto &o : Overrides(common)) cfg.ApplyOverride(o);
    const voclab::StageSummary s =
        voclab::RunStage(voclab::ParseStage(stage_name), cfg, common.run_dir);
    std::cout << voclab::FormatSummary(s);
    if (s.stage == voclab::Stage::kEer)
      std::cout << '\n'
                << std::ifstream(voclab::StageDir(cfg, common.run_dir, s.stage) +
                                 "/eer_mean.txt")
                       .rdbuf();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
