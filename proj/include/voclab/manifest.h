// voclab/manifest.h

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

#ifndef VOCLAB_MANIFEST_H_
#define VOCLAB_MANIFEST_H_

#include <string>
#include <vector>

#include "voclab/wav-io.h"

namespace voclab {

enum class Label { kBonafide, kSpoof };

std::string LabelName(Label l);
Label ParseLabel(const std::string &s);

inline constexpr const char *kHumanSource = "human";

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to Manifest::base_dir
  Label label = Label::kBonafide;
  std::string source;
  std::string subset;  // train, dev or test-*
};

struct Manifest {
  std::string base_dir;
  std::vector<ManifestEntry> entries;

  std::string Resolve(const ManifestEntry &e) const;
  Waveform Load(const ManifestEntry &e) const;
  // Entries whose subset equals `subset` (or, for "test-*", starts with
  // "test-").
  Manifest Subset(const std::string &subset) const;
  // Distinct subset names in first-appearance order.
  std::vector<std::string> SubsetNames() const;
  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Unique ids, well-formed subsets and label == spoof <=> source != human.
void ValidateManifest(const Manifest &m);

// Tab-separated `id path label source subset`, one entry per line, no
// header.  Reading validates the invariants and checks that each path is a
// readable file.
void WriteManifest(const std::string &path, const Manifest &m);
Manifest ReadManifest(const std::string &path);

// Joins several manifests (entries keep their absolute locations).
Manifest Concat(const std::vector<Manifest> &parts);

}  // namespace voclab

#endif  // VOCLAB_MANIFEST_H_
