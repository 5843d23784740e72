// eer.cc

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
#include <limits>
#include <map>
#include <sstream>

#include "voclab/errors.h"
#include "voclab/eval.h"

namespace voclab {

EerResult ComputeEer(const std::vector<double> &bona,
                     const std::vector<double> &spoof) {
  if (bona.empty() || spoof.empty())
    throw InputError("EER needs at least one bona fide and one spoof score");
  for (double s : bona)
    if (!std::isfinite(s)) throw InputError("non-finite bona fide score");
  for (double s : spoof)
    if (!std::isfinite(s)) throw InputError("non-finite spoof score");
  std::vector<double> b = bona, s = spoof;
  std::sort(b.begin(), b.end());
  std::sort(s.begin(), s.end());
  std::vector<double> thr;
  thr.reserve(b.size() + s.size() + 2);
  const double inf = std::numeric_limits<double>::infinity();
  thr.push_back(-inf);
  thr.insert(thr.end(), b.begin(), b.end());
  thr.insert(thr.end(), s.begin(), s.end());
  thr.push_back(inf);
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());

  const double nb = b.size(), ns = s.size();
  // FAR and FRR at each threshold, in increasing threshold order.
  std::vector<double> far(thr.size()), frr(thr.size());
  for (size_t i = 0; i < thr.size(); ++i) {
    const auto spoof_below = std::lower_bound(s.begin(), s.end(), thr[i]) - s.begin();
    const auto bona_below = std::lower_bound(b.begin(), b.end(), thr[i]) - b.begin();
    far[i] = (ns - spoof_below) / ns;
    frr[i] = bona_below / nb;
  }
  EerResult r;
  r.n_bona = static_cast<int>(nb);
  r.n_spoof = static_cast<int>(ns);
  for (size_t i = 0; i < thr.size(); ++i) {
    if (far[i] == frr[i]) {
      r.eer = far[i];
      r.threshold = thr[i];
      return r;
    }
  }
  // FAR - FRR decreases from 1 at -inf to -1 at +inf; find the crossing.
  for (size_t i = 0; i + 1 < thr.size(); ++i) {
    const double d0 = far[i] - frr[i], d1 = far[i + 1] - frr[i + 1];
    if (d0 > 0 && d1 < 0) {
      const double t = d0 / (d0 - d1);
      r.eer = far[i] + t * (far[i + 1] - far[i]);
      if (std::isfinite(thr[i]) && std::isfinite(thr[i + 1]))
        r.threshold = thr[i] + t * (thr[i + 1] - thr[i]);
      else
        r.threshold = std::isfinite(thr[i]) ? thr[i] : thr[i + 1];
      return r;
    }
  }
  throw InputError("EER sweep found no crossing");  // unreachable
}

EerResult ComputeEer(const std::vector<ScoreRecord> &records) {
  std::vector<double> bona, spoof;
  for (const auto &r : records)
    (r.label == Label::kBonafide ? bona : spoof).push_back(r.score);
  return ComputeEer(bona, spoof);
}

EerResult PooledEer(const std::vector<std::vector<ScoreRecord>> &sets) {
  std::vector<ScoreRecord> all;
  for (const auto &s : sets) all.insert(all.end(), s.begin(), s.end());
  return ComputeEer(all);
}

std::vector<ScoreRecord> ScoreDataset(const CMModel &model,
                                      const Manifest &manifest,
                                      const std::string &set_name) {
  if (manifest.empty()) throw InputError("cannot score an empty manifest");
  if (set_name.empty()) throw InputError("set name must be non-empty");
  std::vector<Waveform> audio;
  std::string failed;
  for (const auto &e : manifest.entries) {
    try {
      audio.push_back(manifest.Load(e));
    } catch (const std::exception &) {
      failed += " " + e.id;
    }
  }
  if (!failed.empty()) throw IoError("unreadable audio for:" + failed);
  std::vector<ScoreRecord> out;
  out.reserve(audio.size());
  for (size_t i = 0; i < audio.size(); ++i) {
    const double s = CmScore(model, audio[i]);
    if (!std::isfinite(s))
      throw NumericError("non-finite score for " + manifest.entries[i].id);
    out.push_back({manifest.entries[i].id, set_name, manifest.entries[i].label,
                   s});
  }
  return out;
}

void WriteScores(const std::string &path,
                 const std::vector<ScoreRecord> &records) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  char buf[40];
  for (const auto &r : records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.score);
    os << r.id << '\t' << r.set_name << '\t' << LabelName(r.label) << '\t'
       << buf << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<ScoreRecord> ReadScores(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read score file " + path);
  std::vector<ScoreRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) f.push_back(tok);
    if (f.size() != 4)
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": expected 4 tab-separated fields");
    ScoreRecord r;
    r.id = f[0];
    r.set_name = f[1];
    r.label = ParseLabel(f[2]);
    char *end = nullptr;
    r.score = std::strtod(f[3].c_str(), &end);
    if (end == f[3].c_str() || *end != '\0' || !std::isfinite(r.score))
      throw InputError(path + ":" + std::to_string(lineno) + ": bad score");
    out.push_back(r);
  }
  return out;
}

std::vector<EerRow> EerTable(const std::vector<ScoreRecord> &records) {
  std::vector<std::string> names;
  std::map<std::string, std::vector<ScoreRecord>> by_set;
  for (const auto &r : records) {
    if (!by_set.count(r.set_name)) names.push_back(r.set_name);
    by_set[r.set_name].push_back(r);
  }
  std::vector<EerRow> rows;
  std::vector<std::vector<ScoreRecord>> sets;
  for (const auto &n : names) {
    rows.push_back({n, ComputeEer(by_set[n])});
    sets.push_back(by_set[n]);
  }
  rows.push_back({kPooledSetName, PooledEer(sets)});
  return rows;
}

std::string FormatEerReport(const std::vector<EerRow> &rows) {
  std::ostringstream os;
  os << "set\teer_pct\tthreshold\tn_bona\tn_spoof\n";
  char buf[64];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof(buf), "%.2f\t%.9g", 100.0 * r.result.eer,
                  r.result.threshold);
    os << r.set_name << '\t' << buf << '\t' << r.result.n_bona << '\t'
       << r.result.n_spoof << '\n';
  }
  return os.str();
}

void WriteEerReport(const std::string &path, const std::vector<EerRow> &rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << FormatEerReport(rows);
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace voclab
