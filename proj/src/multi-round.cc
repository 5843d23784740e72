// multi-round.cc

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

#include <cstdio>
#include <sstream>

#include "voclab/errors.h"
#include "voclab/eval.h"

namespace voclab {

MultiRoundReport MultiRound(
    const std::vector<uint64_t> &seeds,
    const std::function<std::vector<ScoreRecord>(int, uint64_t)> &round) {
  if (seeds.empty()) throw ConfigError("multi-round evaluation needs seeds");
  MultiRoundReport rep;
  rep.seeds = seeds;
  for (size_t i = 0; i < seeds.size(); ++i) {
    try {
      rep.rounds.push_back(EerTable(round(static_cast<int>(i), seeds[i])));
    } catch (const std::exception &e) {
      throw std::runtime_error("round " + std::to_string(i) + " failed: " +
                               e.what());
    }
  }
  for (size_t r = 1; r < rep.rounds.size(); ++r) {
    if (rep.rounds[r].size() != rep.rounds[0].size())
      throw InputError("rounds produced different test sets");
    for (size_t k = 0; k < rep.rounds[r].size(); ++k)
      if (rep.rounds[r][k].set_name != rep.rounds[0][k].set_name)
        throw InputError("rounds produced different test sets");
  }
  for (size_t k = 0; k < rep.rounds[0].size(); ++k) {
    double sum = 0.0;
    for (const auto &rows : rep.rounds) sum += rows[k].result.eer;
    rep.mean_eer.push_back({rep.rounds[0][k].set_name, sum / rep.rounds.size()});
  }
  return rep;
}

std::string FormatMultiRoundReport(const MultiRoundReport &r) {
  std::ostringstream os;
  os << "set";
  for (size_t i = 0; i < r.rounds.size(); ++i) os << "\teer_pct_r" << i;
  os << "\teer_pct_mean\n";
  char buf[32];
  for (size_t k = 0; k < r.mean_eer.size(); ++k) {
    os << r.mean_eer[k].first;
    for (const auto &rows : r.rounds) {
      std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * rows[k].result.eer);
      os << '\t' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * r.mean_eer[k].second);
    os << '\t' << buf << '\n';
  }
  return os.str();
}

}  // namespace voclab
