// voclab/eval.h

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

#ifndef VOCLAB_EVAL_H_
#define VOCLAB_EVAL_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "voclab/cm.h"
#include "voclab/manifest.h"
#include "voclab/ssl-encoder.h"

namespace voclab {

struct ScoreRecord {
  std::string id;
  std::string set_name;
  Label label = Label::kBonafide;
  double score = 0.0;  // higher means more likely bona fide
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  int n_bona = 0;
  int n_spoof = 0;
};

/**
   FAR(t) = fraction of spoof scores >= t, FRR(t) = fraction of bona fide
   scores < t.  t sweeps the distinct scores plus -inf and +inf.  If
   FAR - FRR is exactly 0 at a sweep point (the lowest such point is used)
   the EER is FAR there; otherwise FAR and FRR are interpolated linearly
   between the two adjacent points where FAR - FRR changes sign, and the
   threshold is interpolated the same way (or taken from the finite end when
   the other is infinite).  Throws InputError unless both classes are present
   and all scores are finite.
*/
EerResult ComputeEer(const std::vector<ScoreRecord> &records);
EerResult ComputeEer(const std::vector<double> &bona,
                     const std::vector<double> &spoof);

// One global threshold over the concatenation of all sets.
EerResult PooledEer(const std::vector<std::vector<ScoreRecord>> &sets);

// Full-length scoring of every utterance, in manifest order.  Unreadable
// audio aborts with an IoError listing every failed id.
std::vector<ScoreRecord> ScoreDataset(const CMModel &model,
                                      const Manifest &manifest,
                                      const std::string &set_name);

// TAB-separated `id set_name label score`, score as %.17g.
void WriteScores(const std::string &path,
                 const std::vector<ScoreRecord> &records);
std::vector<ScoreRecord> ReadScores(const std::string &path);

inline constexpr const char *kPooledSetName = "Pooled";

struct EerRow {
  std::string set_name;
  EerResult result;
};

// One row per set in first-appearance order, then the pooled row.
std::vector<EerRow> EerTable(const std::vector<ScoreRecord> &records);

// Columns `set eer_pct threshold n_bona n_spoof`, EER in percent with two
// decimals.
std::string FormatEerReport(const std::vector<EerRow> &rows);
void WriteEerReport(const std::string &path, const std::vector<EerRow> &rows);

struct MultiRoundReport {
  std::vector<uint64_t> seeds;
  std::vector<std::vector<EerRow>> rounds;
  // Arithmetic mean of the per-round EERs, per set and pooled.
  std::vector<std::pair<std::string, double>> mean_eer;
};

// Runs `round` once per seed; each call returns the scores of one trained
// model.  A failing round aborts with its index.
MultiRoundReport MultiRound(
    const std::vector<uint64_t> &seeds,
    const std::function<std::vector<ScoreRecord>(int, uint64_t)> &round);

// `set  eer_pct_r0 .. eer_pct_rK  eer_pct_mean`.
std::string FormatMultiRoundReport(const MultiRoundReport &r);

struct Histogram {
  std::vector<double> edges;  // n_bins + 1, symmetric about 0
  std::vector<long> counts;
};

/**
   Histogram of the signed differences encode(a, w) - encode(b, w) pooled
   over frames and dimensions of all utterances.  The range is [-M, M] with
   M the largest observed |difference| (1 when all are zero).  n_bins must be
   odd so that one bin is centred on 0; the bin of v is derived from |v| and
   the sign, which makes hist(a, b) the exact mirror of hist(b, a).  Values
   on an inner edge fall into the bin further from 0.
*/
Histogram FeatureDiffHistogram(const EncoderParams &a, const EncoderParams &b,
                               const std::vector<Waveform> &utts, int n_bins);
Histogram BuildSymmetricHistogram(const std::vector<double> &values,
                                  int n_bins);
void WriteHistogram(const std::string &path, const Histogram &h);

enum class DimSelect { kMaxDiffVariance, kIndex };

struct Trajectory {
  int dim = 0;
  std::vector<std::string> names;  // encoder names then "diff"
  Matrix values;                   // N x (encoders + 1)
};

// Per-frame values of one dimension for each encoder, plus the difference of
// the first two.  kMaxDiffVariance picks the dimension whose difference has
// the largest variance over frames (first on ties; 0 with a warning when all
// variances are 0).
Trajectory FeatureTrajectory(
    const std::vector<std::pair<std::string, EncoderParams>> &encoders,
    const Waveform &w, DimSelect select, int index = 0);
// TAB-separated with a header `frame time_s <names...>`.
void WriteTrajectory(const std::string &path, const Trajectory &t,
                     int total_stride);

}  // namespace voclab

#endif  // VOCLAB_EVAL_H_
