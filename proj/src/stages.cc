// stages.cc

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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "voclab/errors.h"
#include "voclab/eval.h"
#include "voclab/pipeline.h"
#include "voclab/rng.h"

namespace voclab {

namespace fs = std::filesystem;

const std::vector<Stage> &AllStages() {
  static const std::vector<Stage> stages = {
      Stage::kSynth,    Stage::kFeatures, Stage::kVocode,   Stage::kPretrain,
      Stage::kContinual, Stage::kFinetune, Stage::kScore,   Stage::kEer,
      Stage::kHistogram, Stage::kTrajectory};
  return stages;
}

std::string StageName(Stage s) {
  switch (s) {
    case Stage::kSynth: return "synth";
    case Stage::kFeatures: return "features";
    case Stage::kVocode: return "vocode";
    case Stage::kPretrain: return "pretrain";
    case Stage::kContinual: return "continual";
    case Stage::kFinetune: return "finetune";
    case Stage::kScore: return "score";
    case Stage::kEer: return "eer";
    case Stage::kHistogram: return "histogram";
    case Stage::kTrajectory: return "trajectory";
  }
  return "";
}

Stage ParseStage(const std::string &s) {
  for (Stage st : AllStages())
    if (StageName(st) == s) return st;
  throw ConfigError("unknown stage '" + s + "'");
}

namespace {

std::string Join(const std::vector<std::string> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

}  // namespace

std::string FormatSummary(const StageSummary &s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", s.wall_time_s);
  return "stage = " + StageName(s.stage) + "\n" +
         "seed = " + std::to_string(s.seed) + "\n" +
         "inputs = " + Join(s.inputs) + "\n" +
         "outputs = " + Join(s.outputs) + "\n" + "wall_time_s = " + buf + "\n";
}

StageSummary ParseSummary(const std::string &text) {
  StageSummary s;
  std::istringstream is(text);
  std::string line;
  std::set<std::string> seen;
  auto split = [](const std::string &v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
    return out;
  };
  while (std::getline(is, line)) {
    const size_t eq = line.find(" = ");
    if (eq == std::string::npos) {
      if (line.empty()) continue;
      throw InputError("malformed summary line '" + line + "'");
    }
    const std::string k = line.substr(0, eq), v = line.substr(eq + 3);
    seen.insert(k);
    if (k == "stage") s.stage = ParseStage(v);
    else if (k == "seed") s.seed = std::stoull(v);
    else if (k == "inputs") s.inputs = split(v);
    else if (k == "outputs") s.outputs = split(v);
    else if (k == "wall_time_s") s.wall_time_s = std::stod(v);
    else throw InputError("unknown summary key '" + k + "'");
  }
  for (const char *k : {"stage", "seed", "inputs", "outputs", "wall_time_s"})
    if (!seen.count(k)) throw InputError(std::string("summary lacks ") + k);
  return s;
}

std::string StageDir(const ExperimentConfig &cfg, const std::string &run_dir,
                     Stage s) {
  return (fs::path(run_dir) / cfg.Get("preset") / StageName(s)).string();
}

namespace {

// Corpora of the toy experiment.  "main" stands in for the vocoded training
// corpus and its in-domain test set, "wild" for an out-of-domain test set,
// "la19" supplies spoofs that are not paired with the bona fide training
// data, "voxcel" is the larger vocoded corpus used for continual training,
// and "ssl_a" / "ssl_b" are the encoders' pretraining corpora.
const std::vector<std::string> kCorpora = {"main", "wild", "la19", "voxcel",
                                           "ssl_a", "ssl_b"};

bool IsVocoded(const std::string &corpus) {
  return corpus == "main" || corpus == "wild" || corpus == "la19" ||
         corpus == "voxcel";
}

CorpusConfig CorpusFor(const ExperimentConfig &cfg, const std::string &name) {
  CorpusConfig c;
  const uint64_t seed = cfg.GetU64("seed");
  c.duration_s = cfg.GetDouble("corpus.duration_s");
  c.dev_fraction = cfg.GetDouble("corpus.dev_fraction");
  c.test_fraction = cfg.GetDouble("corpus.test_fraction");
  if (name == "main") {
    c.n_utts = cfg.GetInt("corpus.n_utts");
    c.seed = DeriveSeed(seed, 1);
    c.id_prefix = "la";
  } else if (name == "wild") {
    c.n_utts = cfg.GetInt("wild.n_utts");
    c.seed = DeriveSeed(seed, 2);
    c.id_prefix = "wild";
    c.f0_min = 140.0;
    c.f0_max = 320.0;
    c.formant_scale = 1.25;
    c.breath_level = 0.05;
    c.dev_fraction = 0.0;
    c.test_fraction = 1.0;
    c.test_subset = "test-wild";
  } else if (name == "la19") {
    c.n_utts = cfg.GetInt("la19.n_utts");
    c.seed = DeriveSeed(seed, 3);
    c.id_prefix = "tts";
  } else if (name == "voxcel") {
    c.n_utts = cfg.GetInt("voxcel.n_utts");
    c.seed = DeriveSeed(seed, 4);
    c.id_prefix = "vox";
    c.f0_min = 80.0;
    c.f0_max = 260.0;
    c.formant_scale = 0.9;
    c.breath_level = 0.03;
    c.test_fraction = 0.0;
  } else if (name == "ssl_a") {
    c.n_utts = cfg.GetInt("ssl.n_utts");
    c.seed = DeriveSeed(seed, 5);
    c.id_prefix = "sa";
    c.f0_min = 85.0;
    c.f0_max = 230.0;
    c.dev_fraction = c.test_fraction = 0.0;
  } else if (name == "ssl_b") {
    c.n_utts = cfg.GetInt("ssl.n_utts");
    c.seed = DeriveSeed(seed, 6);
    c.id_prefix = "sb";
    c.f0_min = 150.0;
    c.f0_max = 350.0;
    c.formant_scale = 1.3;
    c.breath_level = 0.06;
    c.dev_fraction = c.test_fraction = 0.0;
  } else {
    throw ConfigError("unknown corpus '" + name + "'");
  }
  return c;
}

std::vector<std::string> VocodersOf(const ExperimentConfig &cfg,
                                    const std::string &corpus) {
  std::vector<std::string> v = cfg.GetList("corpus.vocoders");
  // The unpaired spoof corpus uses a single attack.
  if (corpus == "la19") v.resize(1);
  return v;
}

VocoderAssignment AssignOf(const ExperimentConfig &cfg,
                           const std::string &corpus) {
  if (corpus == "wild" || corpus == "la19") return VocoderAssignment::kAll;
  return ParseVocoderAssignment(cfg.Get("corpus.vocoder_assign"));
}

// Tracks the files a stage reads, relative to <run-dir>/<preset>.
class Context {
 public:
  Context(const ExperimentConfig &cfg, const std::string &run_dir)
      : cfg_(cfg), root_(fs::path(run_dir) / cfg.Get("preset")) {}

  const ExperimentConfig &cfg() const { return cfg_; }
  fs::path Dir(Stage s) const { return root_ / StageName(s); }

  // Returns the absolute path of an upstream artifact, or throws a
  // DependencyError naming the producing stage.
  std::string Need(Stage producer, const std::string &rel) {
    const fs::path p = Dir(producer) / rel;
    const std::string r = (fs::path(StageName(producer)) / rel).string();
    if (!fs::exists(p)) throw DependencyError(StageName(producer), r);
    inputs_.push_back(r);
    return p.string();
  }

  std::string NeedFile(const std::string &path) {
    if (!fs::exists(path))
      throw IoError("checkpoint '" + path + "' does not exist");
    inputs_.push_back(path);
    return path;
  }

  // Encoder binding -> loaded parameters.
  EncoderParams Encoder(const std::string &binding) {
    if (binding == "ssl_a") return LoadEncoder(Need(Stage::kPretrain, "ssl_a.ckpt"));
    if (binding == "ssl_b") return LoadEncoder(Need(Stage::kPretrain, "ssl_b.ckpt"));
    if (binding == "ssl_a_cont")
      return LoadEncoder(Need(Stage::kContinual, "ssl_a_cont.ckpt"));
    return LoadEncoder(NeedFile(binding));
  }

  Manifest Bona(const std::string &corpus) {
    return ReadManifest(Need(Stage::kSynth, corpus + "/bonafide.tsv"));
  }
  Manifest Vocoded(const std::string &corpus) {
    return ReadManifest(Need(Stage::kVocode, corpus + "/vocoded.tsv"));
  }

  std::vector<std::string> TakeInputs() {
    std::vector<std::string> v = inputs_;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  fs::path root() const { return root_; }

 private:
  const ExperimentConfig &cfg_;
  fs::path root_;
  std::vector<std::string> inputs_;
};

void WriteText(const fs::path &p, const std::string &text) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  os << text;
  if (!os) throw IoError("write failed: " + p.string());
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RunSynth(Context &ctx, const fs::path &out) {
  for (const auto &c : kCorpora) {
    const CorpusConfig cc = CorpusFor(ctx.cfg(), c);
    if (cc.n_utts == 0) continue;
    SynthCorpus(cc, (out / c).string());
  }
}

void RunFeatures(Context &ctx, const fs::path &out) {
  for (const auto &c : kCorpora) {
    if (!IsVocoded(c) || CorpusFor(ctx.cfg(), c).n_utts == 0) continue;
    WriteFeatureArchive((out / (c + ".feats")).string(),
                        ExtractCorpusFeatures(ctx.Bona(c)));
  }
}

void RunVocode(Context &ctx, const fs::path &out) {
  for (const auto &c : kCorpora) {
    const CorpusConfig cc = CorpusFor(ctx.cfg(), c);
    if (!IsVocoded(c) || cc.n_utts == 0) continue;
    const auto feats =
        ReadFeatureArchive(ctx.Need(Stage::kFeatures, c + ".feats"));
    VocodeCorpus(cc, ctx.Bona(c), feats, VocodersOf(ctx.cfg(), c),
                 AssignOf(ctx.cfg(), c), (out / c).string());
  }
}

void RunPretrain(Context &ctx, const fs::path &out) {
  const ExperimentConfig &cfg = ctx.cfg();
  const uint64_t seed = cfg.GetU64("seed");
  const EncoderConfig enc = cfg.Encoder();
  int stream = 10;
  for (const std::string name : {"ssl_a", "ssl_b"}) {
    const Manifest m = ctx.Bona(name);
    SslTrainResult r =
        Pretrain(m, enc, cfg.Pretraining(), DeriveSeed(seed, stream++));
    SaveEncoder((out / (name + ".ckpt")).string(), r.params);
    WriteTrainingLog((out / (name + ".log")).string(), r.log);
  }
}

void RunContinual(Context &ctx, const fs::path &out) {
  const ExperimentConfig &cfg = ctx.cfg();
  const uint64_t seed = cfg.GetU64("seed");
  const EncoderParams init = ctx.Encoder("ssl_a");
  if (cfg.GetInt("voxcel.n_utts") == 0)
    throw ConfigError("continual training needs voxcel.n_utts > 0");
  const Manifest train = ctx.Vocoded("voxcel").Subset("train");
  SslTrainResult r =
      ContinualTrain(init, train, cfg.Continual(), DeriveSeed(seed, 12));
  SaveEncoder((out / "ssl_a_cont.ckpt").string(), r.params);
  WriteTrainingLog((out / "ssl_a_cont.log").string(), r.log);
  // Held-out check on vocoded data the encoder never saw.
  const Manifest held = ctx.Vocoded("main").Subset("test-*");
  if (!held.empty()) {
    const auto audio = LoadAll(held);
    const MaskConfig mask = cfg.Continual().mask;
    const double before = MeanSslLoss(init, audio, mask, DeriveSeed(seed, 13));
    const double after = MeanSslLoss(r.params, audio, mask, DeriveSeed(seed, 13));
    WriteText(out / "heldout.txt", "pretrained_loss = " + Fmt(before) +
                                       "\ncontinual_loss = " + Fmt(after) +
                                       "\n");
  }
}

struct FinetuneData {
  Manifest bona, spoof, dev;
};

FinetuneData FinetuneCorpus(Context &ctx) {
  const std::string which = ctx.cfg().Get("finetune_corpus");
  FinetuneData d;
  Manifest bona, spoof;
  if (which == "voc_la") {
    bona = ctx.Bona("main");
    spoof = ctx.Vocoded("main");
  } else if (which == "la19trn") {
    if (ctx.cfg().GetInt("la19.n_utts") == 0)
      throw ConfigError("finetune_corpus la19trn needs la19.n_utts > 0");
    bona = ctx.Bona("main");
    spoof = ctx.Vocoded("la19");
  } else {
    if (ctx.cfg().GetInt("voxcel.n_utts") == 0)
      throw ConfigError("finetune_corpus voc_voxcel needs voxcel.n_utts > 0");
    bona = ctx.Bona("voxcel");
    spoof = ctx.Vocoded("voxcel");
  }
  d.bona = bona.Subset("train");
  d.spoof = spoof.Subset("train");
  d.dev = Concat({bona.Subset("dev"), spoof.Subset("dev")});
  return d;
}

// Training groups the fine-tuning loop forms from a manifest pair.
size_t GroupCount(const Manifest &bona, const Manifest &spoof) {
  std::set<std::string> sources;
  for (const auto &e : spoof.entries) {
    const size_t pos = e.id.rfind("__");
    if (pos != std::string::npos) sources.insert(e.id.substr(0, pos));
  }
  size_t unpaired = 0;
  for (const auto &e : bona.entries)
    if (!sources.count(e.id)) ++unpaired;
  return spoof.size() + unpaired;
}

std::string RoundFile(const std::string &stem, size_t round,
                      const std::string &ext) {
  return stem + "_r" + std::to_string(round) + ext;
}

void RunFinetune(Context &ctx, const fs::path &out) {
  const ExperimentConfig &cfg = ctx.cfg();
  const CmMode mode = ParseCmMode(cfg.Get("cm.mode"));
  // Front-end bindings first: they name the earliest missing stage.
  EncoderParams enc, enc_b, teacher_a, teacher_b;
  DistillConfig dcfg;
  if (mode == CmMode::kDistilled) {
    dcfg = cfg.Distill();
    teacher_a = ctx.Encoder(cfg.Get("distill.teacher_a"));
    teacher_b = ctx.Encoder(cfg.Get("distill.teacher_b"));
  } else {
    enc = ctx.Encoder(cfg.Get("cm.encoder"));
    if (mode == CmMode::kDualDiff) {
      if (cfg.Get("cm.encoder_b") == "none")
        throw ConfigError("cm.mode dual_diff needs cm.encoder_b");
      enc_b = ctx.Encoder(cfg.Get("cm.encoder_b"));
    }
  }
  const FinetuneData data = FinetuneCorpus(ctx);
  TrainConfig tcfg = cfg.Training();
  if (cfg.Get("finetune_corpus") == "voc_voxcel" && tcfg.batches_per_epoch == 0) {
    // Same number of mini-batches per epoch as the voc_la corpus.
    const Manifest la_bona = ctx.Bona("main").Subset("train");
    const Manifest la_spoof = ctx.Vocoded("main").Subset("train");
    const size_t groups = GroupCount(la_bona, la_spoof);
    tcfg.batches_per_epoch =
        static_cast<int>((groups + tcfg.batch_size - 1) / tcfg.batch_size);
  }
  const std::vector<uint64_t> seeds = cfg.RoundSeeds();
  for (size_t r = 0; r < seeds.size(); ++r) {
    CMModel model;
    if (mode == CmMode::kSingle) model = MakeSingleCm(enc, seeds[r]);
    else if (mode == CmMode::kDualDiff) model = MakeDualDiffCm(enc, enc_b, seeds[r]);
    else model = MakeDistilledCm(dcfg, teacher_a, teacher_b, seeds[r]);
    TrainConfig rc = tcfg;
    rc.seed = DeriveSeed(tcfg.seed, seeds[r]);
    FinetuneResult res;
    try {
      res = Finetune(model, data.bona, data.spoof, rc, data.dev);
    } catch (const std::exception &e) {
      throw std::runtime_error("round " + std::to_string(r) + ": " + e.what());
    }
    SaveCm((out / RoundFile("cm", r, ".ckpt")).string(), res.model);
    WriteFinetuneReport((out / RoundFile("report", r, ".tsv")).string(),
                        res.report);
  }
}

std::vector<std::pair<std::string, Manifest>> TestSets(Context &ctx) {
  std::vector<std::pair<std::string, Manifest>> sets;
  const Manifest main = Concat({ctx.Bona("main").Subset("test-*"),
                                ctx.Vocoded("main").Subset("test-*")});
  if (!main.empty()) sets.push_back({"test-main", main});
  if (ctx.cfg().GetInt("wild.n_utts") > 0)
    sets.push_back({"test-wild", Concat({ctx.Bona("wild").Subset("test-*"),
                                         ctx.Vocoded("wild").Subset("test-*")})});
  if (sets.empty()) throw ConfigError("no test utterances are configured");
  return sets;
}

void RunScore(Context &ctx, const fs::path &out) {
  const size_t rounds = ctx.cfg().RoundSeeds().size();
  std::vector<CMModel> models;
  for (size_t r = 0; r < rounds; ++r)
    models.push_back(LoadCm(ctx.Need(Stage::kFinetune, RoundFile("cm", r, ".ckpt"))));
  const auto sets = TestSets(ctx);
  for (size_t r = 0; r < rounds; ++r) {
    std::vector<ScoreRecord> all;
    for (const auto &[name, m] : sets) {
      const auto recs = ScoreDataset(models[r], m, name);
      all.insert(all.end(), recs.begin(), recs.end());
    }
    WriteScores((out / RoundFile("scores", r, ".tsv")).string(), all);
  }
}

void RunEer(Context &ctx, const fs::path &out) {
  const std::vector<uint64_t> seeds = ctx.cfg().RoundSeeds();
  std::vector<std::string> files;
  for (size_t r = 0; r < seeds.size(); ++r)
    files.push_back(ctx.Need(Stage::kScore, RoundFile("scores", r, ".tsv")));
  const MultiRoundReport rep =
      MultiRound(seeds, [&](int r, uint64_t) { return ReadScores(files[r]); });
  for (size_t r = 0; r < rep.rounds.size(); ++r)
    WriteEerReport((out / RoundFile("eer", r, ".txt")).string(), rep.rounds[r]);
  WriteText(out / "eer_mean.txt", FormatMultiRoundReport(rep));
}

void RunHistogram(Context &ctx, const fs::path &out) {
  const ExperimentConfig &cfg = ctx.cfg();
  const EncoderParams a = ctx.Encoder(cfg.Get("analysis.enc_a"));
  const EncoderParams b = ctx.Encoder(cfg.Get("analysis.enc_b"));
  const Manifest m = Concat({ctx.Bona("main").Subset("test-*"),
                             ctx.Vocoded("main").Subset("test-*")});
  if (m.empty()) throw ConfigError("histogram needs test-main utterances");
  WriteHistogram((out / "histogram.tsv").string(),
                 FeatureDiffHistogram(a, b, LoadAll(m),
                                      cfg.GetInt("analysis.hist_bins")));
}

void RunTrajectory(Context &ctx, const fs::path &out) {
  const ExperimentConfig &cfg = ctx.cfg();
  const std::string na = cfg.Get("analysis.enc_a"), nb = cfg.Get("analysis.enc_b");
  const EncoderParams a = ctx.Encoder(na), b = ctx.Encoder(nb);
  const Manifest m = ctx.Bona("main").Subset("test-*");
  const size_t idx = cfg.GetInt("analysis.utt");
  if (idx >= m.size())
    throw ConfigError("analysis.utt " + std::to_string(idx) +
                      " exceeds the test-main bona fide count " +
                      std::to_string(m.size()));
  const std::string dim = cfg.Get("analysis.dim");
  const DimSelect sel =
      dim == "max_diff_variance" ? DimSelect::kMaxDiffVariance : DimSelect::kIndex;
  const int index = sel == DimSelect::kIndex ? std::stoi(dim) : 0;
  const Trajectory t = FeatureTrajectory({{na, a}, {nb, b}},
                                         m.Load(m.entries[idx]), sel, index);
  WriteTrajectory((out / "trajectory.tsv").string(), t,
                  a.config.TotalStride());
}

std::vector<std::string> ListOutputs(const fs::path &dir, const fs::path &root) {
  std::vector<std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "summary.txt") continue;
    out.push_back(fs::relative(e.path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

StageSummary RunStage(Stage s, const ExperimentConfig &cfg,
                      const std::string &run_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx(cfg, run_dir);
  const fs::path out = ctx.Dir(s);
  std::error_code ec;
  fs::remove_all(out, ec);
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  try {
    switch (s) {
      case Stage::kSynth: RunSynth(ctx, out); break;
      case Stage::kFeatures: RunFeatures(ctx, out); break;
      case Stage::kVocode: RunVocode(ctx, out); break;
      case Stage::kPretrain: RunPretrain(ctx, out); break;
      case Stage::kContinual: RunContinual(ctx, out); break;
      case Stage::kFinetune: RunFinetune(ctx, out); break;
      case Stage::kScore: RunScore(ctx, out); break;
      case Stage::kEer: RunEer(ctx, out); break;
      case Stage::kHistogram: RunHistogram(ctx, out); break;
      case Stage::kTrajectory: RunTrajectory(ctx, out); break;
    }
  } catch (...) {
    // A failed stage leaves no partial artifacts behind.
    fs::remove_all(out, ec);
    throw;
  }
  WriteText(out / "config.txt", cfg.Serialize());
  StageSummary sum;
  sum.stage = s;
  sum.seed = cfg.GetU64("seed");
  sum.inputs = ctx.TakeInputs();
  sum.outputs = ListOutputs(out, ctx.root());
  sum.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  WriteText(out / "summary.txt", FormatSummary(sum));
  return sum;
}

std::vector<Stage> PresetStages(const ExperimentConfig &cfg) {
  std::vector<Stage> st = {Stage::kSynth, Stage::kFeatures, Stage::kVocode,
                           Stage::kPretrain};
  const CmMode mode = ParseCmMode(cfg.Get("cm.mode"));
  std::vector<std::string> bindings;
  if (mode == CmMode::kDistilled) {
    bindings = {cfg.Get("distill.teacher_a"), cfg.Get("distill.teacher_b")};
  } else {
    bindings.push_back(cfg.Get("cm.encoder"));
    if (mode == CmMode::kDualDiff) bindings.push_back(cfg.Get("cm.encoder_b"));
  }
  if (std::find(bindings.begin(), bindings.end(), "ssl_a_cont") !=
      bindings.end())
    st.push_back(Stage::kContinual);
  for (Stage s : {Stage::kFinetune, Stage::kScore, Stage::kEer}) st.push_back(s);
  return st;
}

std::string RunPreset(const std::string &name, const ExperimentConfig &base,
                      const std::string &run_dir,
                      const std::vector<std::string> &overrides) {
  ExperimentConfig cfg = base;
  ApplyPreset(cfg, name);
  for (const auto &o : overrides) cfg.ApplyOverride(o);
  for (Stage s : PresetStages(cfg)) {
    try {
      RunStage(s, cfg, run_dir);
    } catch (const DependencyError &) {
      throw;
    } catch (const std::exception &e) {
      throw std::runtime_error("preset " + name + ", stage " + StageName(s) +
                               ": " + e.what());
    }
  }
  std::ifstream is(StageDir(cfg, run_dir, Stage::kEer) + "/eer_mean.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace voclab
