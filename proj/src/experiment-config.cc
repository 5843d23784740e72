// experiment-config.cc

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
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "voclab/errors.h"
#include "voclab/pipeline.h"
#include "voclab/vocoder.h"

namespace voclab {

namespace {

std::string Trim(const std::string &s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = Trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

bool ParseLong(const std::string &s, long long *out) {
  if (s.empty()) return false;
  errno = 0;
  char *end = nullptr;
  *out = std::strtoll(s.c_str(), &end, 10);
  return errno == 0 && *end == '\0';
}

bool ParseUnsigned(const std::string &s, unsigned long long *out) {
  if (s.empty() || s[0] == '-') return false;
  errno = 0;
  char *end = nullptr;
  *out = std::strtoull(s.c_str(), &end, 10);
  return errno == 0 && *end == '\0';
}

bool ParseReal(const std::string &s, double *out) {
  if (s.empty()) return false;
  char *end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return *end == '\0' && std::isfinite(*out);
}

using Check = std::function<std::string(const std::string &)>;

Check IntAtLeast(long long lo) {
  return [lo](const std::string &v) -> std::string {
    long long x;
    if (!ParseLong(v, &x)) return "expected an integer";
    if (x < lo) return "must be >= " + std::to_string(lo);
    return "";
  };
}

Check U64() {
  return [](const std::string &v) -> std::string {
    unsigned long long x;
    return ParseUnsigned(v, &x) ? "" : "expected a non-negative integer";
  };
}

Check Real(double lo, double hi, bool lo_open = false) {
  return [=](const std::string &v) -> std::string {
    double x;
    if (!ParseReal(v, &x)) return "expected a finite number";
    if (lo_open ? !(x > lo) : !(x >= lo))
      return std::string("must be ") + (lo_open ? "> " : ">= ") +
             std::to_string(lo);
    if (x > hi) return "must be <= " + std::to_string(hi);
    return "";
  };
}

Check OneOf(std::vector<std::string> allowed) {
  return [allowed](const std::string &v) -> std::string {
    if (std::find(allowed.begin(), allowed.end(), v) != allowed.end())
      return "";
    std::string msg = "expected one of";
    for (const auto &a : allowed) msg += " " + a;
    return msg;
  };
}

Check Bool() { return OneOf({"true", "false"}); }

Check Binding(bool allow_none) {
  return [allow_none](const std::string &v) -> std::string {
    if (v == "ssl_a" || v == "ssl_b" || v == "ssl_a_cont") return "";
    if (allow_none && v == "none") return "";
    if (v.find('/') != std::string::npos ||
        (v.size() > 5 && v.compare(v.size() - 5, 5, ".ckpt") == 0))
      return "";
    return "expected ssl_a, ssl_b, ssl_a_cont" +
           std::string(allow_none ? ", none" : "") + " or a checkpoint path";
  };
}

Check VocoderList() {
  return [](const std::string &v) -> std::string {
    const auto ids = SplitList(v);
    if (ids.empty()) return "expected at least one vocoder";
    for (const auto &id : ids)
      if (std::find(KnownVocoders().begin(), KnownVocoders().end(), id) ==
          KnownVocoders().end())
        return "unknown vocoder '" + id + "'";
    return "";
  };
}

Check SeedList() {
  return [](const std::string &v) -> std::string {
    const auto ids = SplitList(v);
    if (ids.empty()) return "expected at least one seed";
    for (const auto &id : ids) {
      unsigned long long x;
      if (!ParseUnsigned(id, &x)) return "bad seed '" + id + "'";
    }
    return "";
  };
}

Check Name() {
  return [](const std::string &v) -> std::string {
    if (v.empty()) return "must be non-empty";
    for (char c : v)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_'))
        return "may only contain letters, digits, '-' and '_'";
    return "";
  };
}

Check DimSelectCheck() {
  return [](const std::string &v) -> std::string {
    long long x;
    if (v == "max_diff_variance" || (ParseLong(v, &x) && x >= 0)) return "";
    return "expected max_diff_variance or a dimension index";
  };
}

struct KeySpec {
  std::string def;
  Check check;
};

const std::map<std::string, KeySpec> &Specs() {
  static const std::map<std::string, KeySpec> specs = {
      {"preset", {"custom", Name()}},
      {"seed", {"0", U64()}},
      {"corpus.n_utts", {"200", IntAtLeast(1)}},
      {"corpus.duration_s", {"1.0", Real(0.5, 10.0)}},
      {"corpus.dev_fraction", {"0.1", Real(0.0, 1.0)}},
      {"corpus.test_fraction", {"0.2", Real(0.0, 1.0)}},
      {"corpus.vocoders", {"griffin,harmnoise", VocoderList()}},
      {"corpus.vocoder_assign", {"all", OneOf({"all", "alternate"})}},
      {"wild.n_utts", {"40", IntAtLeast(0)}},
      {"la19.n_utts", {"200", IntAtLeast(0)}},
      {"voxcel.n_utts", {"400", IntAtLeast(0)}},
      {"ssl.n_utts", {"200", IntAtLeast(1)}},
      {"ssl.dim", {"64", IntAtLeast(1)}},
      {"ssl.depth", {"2", IntAtLeast(1)}},
      {"ssl.heads", {"4", IntAtLeast(1)}},
      {"ssl.ffn_dim", {"256", IntAtLeast(1)}},
      {"ssl.conv_channels", {"32", IntAtLeast(1)}},
      {"pretrain.epochs", {"10", IntAtLeast(0)}},
      {"pretrain.batch_size", {"8", IntAtLeast(1)}},
      {"pretrain.lr", {"1e-3", Real(0.0, 1.0, true)}},
      {"pretrain.max_trunc_s", {"4.0", Real(0.025, 60.0)}},
      {"mask.span_len", {"5", IntAtLeast(1)}},
      {"mask.fraction", {"0.5", Real(0.0, 1.0, true)}},
      {"continual.epochs", {"3", IntAtLeast(0)}},
      {"continual.lr", {"1e-4", Real(0.0, 1.0, true)}},
      {"cm.mode", {"single", OneOf({"single", "dual_diff", "distilled"})}},
      {"cm.encoder", {"ssl_a", Binding(false)}},
      {"cm.encoder_b", {"none", Binding(true)}},
      {"finetune_corpus", {"voc_la", OneOf({"voc_la", "la19trn", "voc_voxcel"})}},
      {"distill.lambda", {"100", Real(0.0, 1e9)}},
      {"distill.target", {"output", OneOf({"output", "hidden"})}},
      {"distill.init", {"teacher", OneOf({"teacher", "random"})}},
      {"distill.teacher_a", {"ssl_a", Binding(false)}},
      {"distill.teacher_b", {"ssl_a_cont", Binding(false)}},
      {"train.lr0", {"1e-4", Real(0.0, 1.0, true)}},
      {"train.batch_size", {"4", IntAtLeast(1)}},
      {"train.max_epochs", {"20", IntAtLeast(1)}},
      {"train.patience", {"10", IntAtLeast(1)}},
      {"train.lambda_cf", {"1", Real(0.0, 1e9)}},
      {"train.lambda_dis", {"100", Real(0.0, 1e9)}},
      {"train.max_trunc_s", {"4.0", Real(0.025, 60.0)}},
      {"train.seed", {"0", U64()}},
      {"train.batches_per_epoch", {"0", IntAtLeast(0)}},
      {"aug.enabled", {"true", Bool()}},
      {"eval.seeds", {"1,2,3", SeedList()}},
      {"analysis.enc_a", {"ssl_a", Binding(false)}},
      {"analysis.enc_b", {"ssl_a_cont", Binding(false)}},
      {"analysis.hist_bins", {"101", IntAtLeast(1)}},
      {"analysis.dim", {"max_diff_variance", DimSelectCheck()}},
      {"analysis.utt", {"0", IntAtLeast(0)}},
  };
  return specs;
}

const char *kLambdaKeys[2] = {"distill.lambda", "train.lambda_dis"};

bool IsLambdaKey(const std::string &k) {
  return k == kLambdaKeys[0] || k == kLambdaKeys[1];
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto &[k, spec] : Specs()) values_[k] = spec.def;
}

const std::vector<std::string> &ExperimentConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto &kv : Specs()) k.push_back(kv.first);
    return k;
  }();
  return keys;
}

void ExperimentConfig::Set(const std::string &key, const std::string &raw) {
  auto it = Specs().find(key);
  if (it == Specs().end()) throw ConfigError("unknown config key '" + key + "'");
  const std::string value = Trim(raw);
  const std::string err = it->second.check(value);
  if (!err.empty())
    throw ConfigError(key + " = '" + value + "': " + err);
  if (IsLambdaKey(key)) {
    values_[kLambdaKeys[0]] = value;
    values_[kLambdaKeys[1]] = value;
  } else {
    values_[key] = value;
  }
}

void ExperimentConfig::ApplyOverride(const std::string &assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  Set(Trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::Parse(const std::string &text,
                                         const std::string &origin) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos)
      throw ConfigError(where + "expected 'key = value'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    try {
      cfg.Set(key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
    if (IsLambdaKey(key)) {
      const std::string other =
          key == kLambdaKeys[0] ? kLambdaKeys[1] : kLambdaKeys[0];
      auto o = seen.find(other);
      if (o != seen.end() && std::stod(o->second) != std::stod(value))
        throw ConfigError(where + key + " conflicts with " + other +
                          " (they name the same weight)");
    }
    seen[key] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return Parse(ss.str(), path);
}

const std::string &ExperimentConfig::Get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

int ExperimentConfig::GetInt(const std::string &key) const {
  return static_cast<int>(std::stoll(Get(key)));
}

uint64_t ExperimentConfig::GetU64(const std::string &key) const {
  return std::stoull(Get(key));
}

double ExperimentConfig::GetDouble(const std::string &key) const {
  return std::strtod(Get(key).c_str(), nullptr);
}

bool ExperimentConfig::GetBool(const std::string &key) const {
  return Get(key) == "true";
}

std::vector<std::string> ExperimentConfig::GetList(
    const std::string &key) const {
  return SplitList(Get(key));
}

std::string ExperimentConfig::Serialize() const {
  std::string out;
  for (const auto &[k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

EncoderConfig ExperimentConfig::Encoder() const {
  EncoderConfig c;
  c.dim = GetInt("ssl.dim");
  c.depth = GetInt("ssl.depth");
  c.heads = GetInt("ssl.heads");
  c.ffn_dim = GetInt("ssl.ffn_dim");
  c.conv_channels = GetInt("ssl.conv_channels");
  c.Validate();
  return c;
}

SslTrainConfig ExperimentConfig::Pretraining() const {
  SslTrainConfig c;
  c.epochs = GetInt("pretrain.epochs");
  c.batch_size = GetInt("pretrain.batch_size");
  c.lr = GetDouble("pretrain.lr");
  c.max_trunc_s = GetDouble("pretrain.max_trunc_s");
  c.mask.span_len = GetInt("mask.span_len");
  c.mask.mask_fraction = GetDouble("mask.fraction");
  return c;
}

SslTrainConfig ExperimentConfig::Continual() const {
  SslTrainConfig c = Pretraining();
  c.epochs = GetInt("continual.epochs");
  c.lr = GetDouble("continual.lr");
  return c;
}

TrainConfig ExperimentConfig::Training() const {
  TrainConfig c;
  c.lr0 = GetDouble("train.lr0");
  c.batch_size = GetInt("train.batch_size");
  c.max_epochs = GetInt("train.max_epochs");
  c.patience = GetInt("train.patience");
  c.lambda_cf = GetDouble("train.lambda_cf");
  c.lambda_dis = GetDouble("train.lambda_dis");
  c.max_trunc_s = GetDouble("train.max_trunc_s");
  c.seed = GetU64("train.seed");
  c.batches_per_epoch = GetInt("train.batches_per_epoch");
  c.aug_enabled = GetBool("aug.enabled");
  c.Validate();
  return c;
}

DistillConfig ExperimentConfig::Distill() const {
  DistillConfig c;
  c.lambda_dis = GetDouble("distill.lambda");
  c.target = ParseDistillTarget(Get("distill.target"));
  c.student_init = ParseStudentInit(Get("distill.init"));
  c.teacher_a_ckpt = Get("distill.teacher_a");
  c.teacher_b_ckpt = Get("distill.teacher_b");
  c.Validate();
  return c;
}

std::vector<uint64_t> ExperimentConfig::RoundSeeds() const {
  std::vector<uint64_t> out;
  for (const auto &s : GetList("eval.seeds")) out.push_back(std::stoull(s));
  return out;
}

const std::vector<std::string> &PresetNames() {
  static const std::vector<std::string> names = {
      "b1",   "b2",   "b3",   "p1",   "p2",   "p3",   "b1-b", "p3-b",
      "b1-c", "p3-c", "p3-2", "p3-3", "p3-4", "p3-5"};
  return names;
}

void ApplyPreset(ExperimentConfig &cfg, const std::string &name) {
  if (std::find(PresetNames().begin(), PresetNames().end(), name) ==
      PresetNames().end())
    throw ConfigError("unknown preset '" + name + "'");
  const std::string base = name.substr(0, 2);
  const std::string variant = name.size() > 2 ? name.substr(3) : "";
  std::map<std::string, std::string> kv = {
      {"preset", name},
      {"cm.encoder", "ssl_a"},
      {"cm.encoder_b", "none"},
      {"finetune_corpus", "voc_la"},
      {"distill.lambda", "100"},
      {"distill.target", "output"},
      {"distill.init", "teacher"},
      {"distill.teacher_a", "ssl_a"},
      {"distill.teacher_b", "ssl_a_cont"},
      {"analysis.enc_a", "ssl_a"},
      {"analysis.enc_b", "ssl_a_cont"},
  };
  if (base == "b1" || base == "p1") {
    kv["cm.mode"] = "single";
    if (base == "p1") kv["cm.encoder"] = "ssl_a_cont";
  } else if (base == "b2" || base == "p2") {
    kv["cm.mode"] = "dual_diff";
    kv["cm.encoder_b"] = base == "b2" ? "ssl_b" : "ssl_a_cont";
  } else {
    kv["cm.mode"] = "distilled";
    kv["distill.teacher_b"] = base == "b3" ? "ssl_b" : "ssl_a_cont";
  }
  if (base == "b2" || base == "b3") kv["analysis.enc_b"] = "ssl_b";
  if (variant == "b") kv["finetune_corpus"] = "la19trn";
  if (variant == "c") kv["finetune_corpus"] = "voc_voxcel";
  if (variant == "2") kv["distill.lambda"] = "10";
  if (variant == "3") kv["distill.lambda"] = "1000";
  if (variant == "4") kv["distill.target"] = "hidden";
  if (variant == "5") kv["distill.init"] = "random";
  for (const auto &[k, v] : kv) cfg.Set(k, v);
}

}  // namespace voclab
