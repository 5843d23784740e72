// feature-analysis.cc

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

#include <cmath>
#include <cstdio>
#include <fstream>

#include "voclab/distill.h"
#include "voclab/errors.h"
#include "voclab/eval.h"

namespace voclab {

Histogram BuildSymmetricHistogram(const std::vector<double> &values,
                                  int n_bins) {
  if (n_bins < 1 || n_bins % 2 == 0)
    throw ConfigError("histogram n_bins must be a positive odd number");
  double m = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("non-finite histogram value");
    m = std::max(m, std::abs(v));
  }
  if (m == 0.0) m = 1.0;
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i)
    h.edges[i] = m * (2 * i - n_bins) / n_bins;
  h.counts.assign(n_bins, 0);
  const int centre = (n_bins - 1) / 2;
  for (double v : values) {
    // Distance from the centre bin in bins; the centre bin spans
    // [-m / n_bins, m / n_bins).
    long k = static_cast<long>(std::floor(std::abs(v) * n_bins / (2.0 * m) + 0.5));
    k = std::min<long>(k, centre);
    const long idx = v < 0 ? centre - k : centre + k;
    ++h.counts[idx];
  }
  return h;
}

Histogram FeatureDiffHistogram(const EncoderParams &a, const EncoderParams &b,
                               const std::vector<Waveform> &utts, int n_bins) {
  if (a.config.dim != b.config.dim)
    throw InputError("histogram encoders differ in dimension");
  std::vector<double> values;
  for (const auto &w : utts) {
    const FeatureSequence d =
        DiffFeatures(Encode(a, w), Encode(b, w), DiffMode::kSigned);
    values.insert(values.end(), d.values.data(),
                  d.values.data() + d.values.size());
  }
  return BuildSymmetricHistogram(values, n_bins);
}

void WriteHistogram(const std::string &path, const Histogram &h) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "bin_lo\tbin_hi\tcount\n";
  char buf[64];
  for (size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g\t%.9g", h.edges[i], h.edges[i + 1]);
    os << buf << '\t' << h.counts[i] << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

Trajectory FeatureTrajectory(
    const std::vector<std::pair<std::string, EncoderParams>> &encoders,
    const Waveform &w, DimSelect select, int index) {
  if (encoders.size() < 2)
    throw InputError("trajectory export needs at least two encoders");
  const int d = encoders[0].second.config.dim;
  for (const auto &e : encoders)
    if (e.second.config.dim != d)
      throw InputError("trajectory encoders differ in dimension");
  std::vector<Matrix> feats;
  for (const auto &e : encoders) feats.push_back(Encode(e.second, w).values);
  const Matrix diff = feats[0] - feats[1];
  Trajectory t;
  if (select == DimSelect::kIndex) {
    if (index < 0 || index >= d)
      throw InputError("trajectory dimension " + std::to_string(index) +
                       " out of range [0, " + std::to_string(d) + ")");
    t.dim = index;
  } else {
    double best = -1.0;
    for (int j = 0; j < d; ++j) {
      const double mean = diff.col(j).mean();
      const double var = (diff.col(j).array() - mean).square().mean();
      if (var > best) {
        best = var;
        t.dim = j;
      }
    }
    if (best == 0.0) {
      Warn("differential features have zero variance; using dimension 0");
      t.dim = 0;
    }
  }
  const Eigen::Index n = diff.rows();
  t.values.resize(n, encoders.size() + 1);
  for (size_t e = 0; e < encoders.size(); ++e) {
    t.names.push_back(encoders[e].first);
    t.values.col(e) = feats[e].col(t.dim);
  }
  t.names.push_back("diff");
  t.values.col(encoders.size()) = diff.col(t.dim);
  return t;
}

void WriteTrajectory(const std::string &path, const Trajectory &t,
                     int total_stride) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# dim " << t.dim << '\n' << "frame\ttime_s";
  for (const auto &n : t.names) os << '\t' << n;
  os << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f",
                  static_cast<double>(i) * total_stride / kSampleRate);
    os << i << '\t' << buf;
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", t.values(i, j));
      os << '\t' << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace voclab
