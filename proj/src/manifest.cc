// manifest.cc

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

#include "voclab/manifest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "voclab/errors.h"

namespace voclab {

namespace fs = std::filesystem;

std::string LabelName(Label l) {
  return l == Label::kBonafide ? "bonafide" : "spoof";
}

Label ParseLabel(const std::string &s) {
  if (s == "bonafide") return Label::kBonafide;
  if (s == "spoof") return Label::kSpoof;
  throw InputError("unknown label '" + s + "' (expected bonafide or spoof)");
}

std::string Manifest::Resolve(const ManifestEntry &e) const {
  fs::path p(e.path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

Waveform Manifest::Load(const ManifestEntry &e) const {
  return ReadWav(Resolve(e), e.id);
}

Manifest Manifest::Subset(const std::string &subset) const {
  Manifest out;
  out.base_dir = base_dir;
  const bool any_test = subset == "test-*";
  for (const auto &e : entries)
    if (e.subset == subset || (any_test && e.subset.rfind("test-", 0) == 0))
      out.entries.push_back(e);
  return out;
}

std::vector<std::string> Manifest::SubsetNames() const {
  std::vector<std::string> names;
  for (const auto &e : entries)
    if (std::find(names.begin(), names.end(), e.subset) == names.end())
      names.push_back(e.subset);
  return names;
}

void ValidateManifest(const Manifest &m) {
  std::set<std::string> ids;
  for (const auto &e : m.entries) {
    if (e.id.empty()) throw InputError("manifest entry with empty id");
    if (!ids.insert(e.id).second)
      throw InputError("duplicate manifest id '" + e.id + "'");
    for (const std::string *f : {&e.id, &e.path, &e.source, &e.subset})
      if (f->find_first_of("\t\n") != std::string::npos || f->empty())
        throw InputError("manifest entry " + e.id +
                         " has an empty field or embedded tab/newline");
    const bool human = e.source == kHumanSource;
    if (human != (e.label == Label::kBonafide))
      throw InputError("manifest entry " + e.id + ": label " +
                       LabelName(e.label) + " inconsistent with source '" +
                       e.source + "'");
    if (e.subset != "train" && e.subset != "dev" &&
        !(e.subset.size() > 5 && e.subset.rfind("test-", 0) == 0))
      throw InputError("manifest entry " + e.id + " has invalid subset '" +
                       e.subset + "'");
  }
}

void WriteManifest(const std::string &path, const Manifest &m) {
  ValidateManifest(m);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open manifest " + path + " for writing");
  const fs::path dir = fs::absolute(fs::path(path)).parent_path();
  for (const auto &e : m.entries) {
    fs::path rel = fs::path(m.Resolve(e));
    if (rel.is_absolute() || !m.base_dir.empty())
      rel = fs::absolute(rel).lexically_relative(dir);
    os << e.id << '\t' << rel.generic_string() << '\t' << LabelName(e.label)
       << '\t' << e.source << '\t' << e.subset << '\n';
  }
  if (!os) throw IoError("write failed for manifest " + path);
}

Manifest ReadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path);
  Manifest m;
  m.base_dir = fs::absolute(fs::path(path)).parent_path().string();
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) f.push_back(tok);
    if (f.size() != 5)
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": expected 5 tab-separated fields");
    ManifestEntry e{f[0], f[1], ParseLabel(f[2]), f[3], f[4]};
    m.entries.push_back(std::move(e));
  }
  ValidateManifest(m);
  for (const auto &e : m.entries) {
    std::ifstream probe(m.Resolve(e), std::ios::binary);
    if (!probe)
      throw IoError("manifest " + path + ": entry " + e.id +
                    " points to unreadable file " + m.Resolve(e));
  }
  return m;
}

Manifest Concat(const std::vector<Manifest> &parts) {
  Manifest out;
  for (const auto &p : parts)
    for (auto e : p.entries) {
      e.path = fs::absolute(fs::path(p.Resolve(e))).string();
      out.entries.push_back(std::move(e));
    }
  ValidateManifest(out);
  return out;
}

}  // namespace voclab
