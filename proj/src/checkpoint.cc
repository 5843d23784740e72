// checkpoint.cc

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

#include "voclab/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "voclab/errors.h"

namespace voclab {

namespace {

const char kMagic[8] = {'V', 'O', 'C', 'L', 'A', 'B', 'C', 'K'};
const uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void Put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

void PutString(std::ostream &os, const std::string &s) {
  Put<uint32_t>(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T Get(std::istream &is, const std::string &path) {
  T v;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw IoError("truncated checkpoint " + path);
  return v;
}

std::string GetString(std::istream &is, const std::string &path) {
  const uint32_t n = Get<uint32_t>(is, path);
  if (n > (1u << 20)) throw IoError("corrupt string length in " + path);
  std::string s(n, '\0');
  if (!is.read(s.data(), n)) throw IoError("truncated checkpoint " + path);
  return s;
}

}  // namespace

void WriteCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  Put<uint32_t>(os, kVersion);
  Put<uint32_t>(os, static_cast<uint32_t>(ckpt.metadata.size()));
  for (const auto &[k, v] : ckpt.metadata) {
    PutString(os, k);
    PutString(os, v);
  }
  Put<uint32_t>(os, static_cast<uint32_t>(ckpt.arrays.size()));
  for (const auto &[name, m] : ckpt.arrays) {
    PutString(os, name);
    Put<uint64_t>(os, static_cast<uint64_t>(m.rows()));
    Put<uint64_t>(os, static_cast<uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char *>(m.data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!os) throw IoError("write failed for " + path);
}

Checkpoint ReadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not a voclab checkpoint: " + path);
  const uint32_t version = Get<uint32_t>(is, path);
  if (version != kVersion)
    throw IoError("unsupported checkpoint version in " + path);
  Checkpoint ckpt;
  const uint32_t n_meta = Get<uint32_t>(is, path);
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = GetString(is, path);
    ckpt.metadata[k] = GetString(is, path);
  }
  const uint32_t n_arrays = Get<uint32_t>(is, path);
  for (uint32_t i = 0; i < n_arrays; ++i) {
    std::string name = GetString(is, path);
    const uint64_t rows = Get<uint64_t>(is, path);
    const uint64_t cols = Get<uint64_t>(is, path);
    if (rows * cols > (1ull << 32))
      throw IoError("corrupt array shape for " + name + " in " + path);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!is.read(reinterpret_cast<char *>(m.data()),
                 static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw IoError("truncated array " + name + " in " + path);
    ckpt.arrays.emplace(std::move(name), std::move(m));
  }
  return ckpt;
}

const std::string &RequireMeta(const Checkpoint &ckpt, const std::string &key,
                               const std::string &path) {
  auto it = ckpt.metadata.find(key);
  if (it == ckpt.metadata.end())
    throw ConfigError("checkpoint " + path + " lacks metadata key '" + key +
                      "'");
  return it->second;
}

}  // namespace voclab
