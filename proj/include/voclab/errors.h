// voclab/errors.h

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

#ifndef VOCLAB_ERRORS_H_
#define VOCLAB_ERRORS_H_

#include <iostream>
#include <stdexcept>
#include <string>

namespace voclab {

// Invalid or inconsistent configuration values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string &msg)
      : std::runtime_error("config error: " + msg) {}
};

// Inputs that violate an operation's preconditions (shapes, lengths, labels).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string &msg)
      : std::runtime_error("input error: " + msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string &msg)
      : std::runtime_error("i/o error: " + msg) {}
};

// Training produced a NaN/Inf loss.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string &msg)
      : std::runtime_error("numeric error: " + msg) {}
};

inline void Warn(const std::string &msg) {
  std::cerr << "WARNING: " << msg << '\n';
}

}  // namespace voclab

#endif  // VOCLAB_ERRORS_H_
