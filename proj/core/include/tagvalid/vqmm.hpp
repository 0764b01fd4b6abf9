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

#include <cstdint>
#include <span>
#include <vector>

#include "tagvalid/features.hpp"
#include "tagvalid/label.hpp"

namespace tagvalid {

inline constexpr std::size_t kCodebookSize = 75;

struct Codebook {
  std::vector<MfccFrame> centroids;
  std::uint64_t seed = 0;

  std::size_t size() const { return centroids.size(); }
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // max centroid movement
};

struct KMeansResult {
  Codebook codebook;
  // Within-cluster sum of squares after every assignment step.
  std::vector<double> objective;
  std::size_t iterations = 0;
};

// k-means with k-means++ seeding; deterministic given the seed.
KMeansResult train_codebook(std::span<const MfccFrame> frames, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& options = {});

// Nearest centroid per frame, ties to the lowest index.
std::uint32_t encode_frame(const Codebook& codebook, const MfccFrame& frame);
std::vector<std::uint32_t> encode(const Codebook& codebook, const MfccSequence& sequence);

using CodeSequence = std::vector<std::uint32_t>;

// First-order Markov chain over codewords, stored as log probabilities.
struct MarkovModel {
  std::size_t symbols = 0;
  double smoothing = 1.0;
  std::vector<double> log_initial;     // symbols
  std::vector<double> log_transition;  // symbols x symbols, row = previous symbol

  double log_transition_at(std::size_t from, std::size_t to) const {
    return log_transition[from * symbols + to];
  }
  double log_probability(std::span<const std::uint32_t> codes) const;
};

// Additive smoothing of initial and transition counts. With smoothing 0 a
// row without observations becomes uniform.
MarkovModel train_markov(std::span<const CodeSequence> sequences, std::size_t symbols, double smoothing = 1.0);

struct VqmmScore {
  double log_p_vocals = 0.0;
  double log_p_nonvocals = 0.0;
  Label label = kTieLabel;
};

// Vocals iff log P under the Vocals model exceeds the Non-Vocals one.
VqmmScore score_vqmm(const MarkovModel& vocals, const MarkovModel& nonvocals,
                     std::span<const std::uint32_t> codes);

}  // namespace tagvalid
