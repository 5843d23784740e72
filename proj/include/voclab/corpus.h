// voclab/corpus.h

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

#ifndef VOCLAB_CORPUS_H_
#define VOCLAB_CORPUS_H_

#include <string>
#include <vector>

#include "voclab/acoustic-features.h"
#include "voclab/manifest.h"
#include "voclab/waveform-synth.h"

namespace voclab {

struct CorpusManifests {
  Manifest bonafide;
  Manifest vocoded;
};

// Subset for utterance `index` under the config's dev/test fractions.
std::string SubsetFor(const CorpusConfig &cfg, int index);

// Id of the utterance produced by vocoding `source_id` with `vocoder_id`.
std::string VocodedId(const std::string &source_id,
                      const std::string &vocoder_id);
// Inverse of VocodedId; throws InputError for ids without the separator.
std::pair<std::string, std::string> SplitVocodedId(const std::string &id);

uint64_t VocodeSeed(uint64_t corpus_seed, int utt_index, int vocoder_index);

enum class VocoderAssignment {
  kAll,        // every utterance through every vocoder
  kAlternate,  // utterance i through vocoder i mod n only
};

VocoderAssignment ParseVocoderAssignment(const std::string &s);
std::string VocoderAssignmentName(VocoderAssignment a);

// Indices into `vocoder_ids` applied to utterance `utt_index`.
std::vector<int> VocodersFor(size_t n_vocoders, VocoderAssignment a,
                             int utt_index);

// Writes <output_dir>/wav/<id>.wav and <output_dir>/bonafide.tsv.
Manifest SynthCorpus(const CorpusConfig &cfg, const std::string &output_dir);

// Features (with F0) of every manifest entry, read back from disk.
std::vector<AcousticFeatures> ExtractCorpusFeatures(const Manifest &m);

// Feature archive in the checkpoint container: arrays <id>.mel and <id>.f0,
// analysis settings in the metadata.
void WriteFeatureArchive(const std::string &path,
                         const std::vector<AcousticFeatures> &feats);
std::vector<AcousticFeatures> ReadFeatureArchive(const std::string &path);

// Vocodes the features of `bonafide` (same order) and writes the waveforms
// plus <output_dir>/vocoded.tsv.  Entries inherit the source subset.
Manifest VocodeCorpus(const CorpusConfig &cfg, const Manifest &bonafide,
                      const std::vector<AcousticFeatures> &feats,
                      const std::vector<std::string> &vocoder_ids,
                      VocoderAssignment assign, const std::string &output_dir);

/**
   Synthesises the bona fide corpus, extracts features (with F0) and vocodes
   every utterance with every vocoder.  Writes
     <output_dir>/wav/<id>.wav, <output_dir>/wav/<id>__<vocoder>.wav,
     <output_dir>/bonafide.tsv, <output_dir>/vocoded.tsv.
   Vocoded entries inherit the subset of their source utterance.
*/
CorpusManifests BuildCorpus(
    const CorpusConfig &cfg, const std::vector<std::string> &vocoder_ids,
    const std::string &output_dir,
    VocoderAssignment assign = VocoderAssignment::kAll);

}  // namespace voclab

#endif  // VOCLAB_CORPUS_H_
