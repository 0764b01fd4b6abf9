// Copyright 2026 The tagvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tagvalid/label.hpp"

namespace tagvalid {

inline constexpr std::string_view kManifestHeader = "#tagvalid-manifest v1";
inline constexpr std::string_view kVocabularyHeader = "#tagvalid-vocab v1";
inline constexpr std::string_view kFoldsHeader = "#tagvalid-folds v1";
inline constexpr std::string_view kLabelsHeader = "#tagvalid-labels v1";

struct ManifestRecord {
  std::string id;
  std::filesystem::path path;  // absolute once loaded
  std::string artist;
  std::vector<std::string> tags;
};

// Tab-separated text: a header line "#tagvalid-manifest v1 <name>", then one
// record per line with columns id, path, artist, tags (';'-separated).
// Relative paths are taken relative to the manifest's directory.
struct Manifest {
  std::string name;
  std::vector<ManifestRecord> records;

  std::string serialize(const std::filesystem::path& relative_to = {}) const;
};

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir, bool check_files = true);
Manifest load_manifest(const std::filesystem::path& path);

enum class UnmatchedPolicy { kDrop, kNonVocals };

// Raw tags that stand for Vocals and for Non-Vocals. Matching ignores case.
struct VocabularyMap {
  std::vector<std::string> vocals;
  std::vector<std::string> nonvocals;
  UnmatchedPolicy unmatched = UnmatchedPolicy::kDrop;

  void validate() const;
  std::string serialize() const;
};

// Header line, optional "unmatched=drop|nonvocals", then "[vocals]" and
// "[nonvocals]" sections with one tag per line. '#' starts a comment.
VocabularyMap parse_vocabulary(std::string_view text);
VocabularyMap load_vocabulary(const std::filesystem::path& path);

struct LabeledRecord {
  ManifestRecord record;
  Label label;
};

struct LabeledDataset {
  std::string name;
  std::vector<LabeledRecord> records;
  std::vector<std::string> warnings;

  Manifest manifest() const;
};

// Any Vocals tag gives Vocals and any Non-Vocals tag gives Non-Vocals; a
// record matching both is dropped with a warning. Unmatched records follow
// the map's policy.
LabeledDataset reduce_vocabulary(const Manifest& manifest, const VocabularyMap& vmap);

// "id,label" lines under a versioned header; the file format used for
// ground truth before and after a validity run.
std::string serialize_labels(const LabeledDataset& data);

struct FoldAssignment {
  std::size_t k = 0;
  std::map<std::string, int> fold_of;
  std::vector<std::string> warnings;

  std::vector<std::string> ids_in(int fold) const;
  std::string serialize() const;
  static FoldAssignment parse(std::string_view text);
};

// Artists are sorted by id, shuffled with the seed, stably ordered by
// instance count (largest first) and each placed in the fold that is
// currently smallest by (instances, Vocals instances).
FoldAssignment make_folds(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

// Throws when an artist spans two folds or a record is unassigned.
void verify_artist_filter(const LabeledDataset& data, const FoldAssignment& folds);

struct SynthOptions {
  std::size_t n_vocals = 100;
  std::size_t n_nonvocals = 50;
  std::size_t n_artists = 30;
  double duration_s = 10.0;
  std::uint64_t seed = 1;
};

// Renders one clip; clip i belongs to artist i mod n_artists and is Vocals
// for i < n_vocals.
std::vector<double> synth_clip(const SynthOptions& options, std::size_t index);

// Writes clip WAVs and "manifest.tsv" into `dir`; returns the manifest.
// Vocals clips carry the raw tag "male.singing" or "female.singing",
// Non-Vocals clips "no.singing".
Manifest synth_generate(const SynthOptions& options, const std::filesystem::path& dir);

}  // namespace tagvalid
