// voclab/checkpoint.h

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

#ifndef VOCLAB_CHECKPOINT_H_
#define VOCLAB_CHECKPOINT_H_

#include <map>
#include <string>

#include "voclab/autograd.h"

namespace voclab {

// Named parameter arrays; the ordered map fixes iteration (and file) order.
using ParamMap = std::map<std::string, Matrix>;
using Metadata = std::map<std::string, std::string>;

struct Checkpoint {
  Metadata metadata;
  ParamMap arrays;
};

/**
   Binary container: magic "VOCLABCK", u32 version, u32 metadata count, then
   (u32 length-prefixed key, value) pairs, u32 array count, then per array a
   length-prefixed name, u64 rows, u64 cols and rows*cols little-endian
   float64 values in row-major order.  Reads back bit-exactly.
*/
void WriteCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint ReadCheckpoint(const std::string &path);

// Returns metadata value or throws ConfigError naming the key and file.
const std::string &RequireMeta(const Checkpoint &ckpt, const std::string &key,
                               const std::string &path = "");

}  // namespace voclab

#endif  // VOCLAB_CHECKPOINT_H_
