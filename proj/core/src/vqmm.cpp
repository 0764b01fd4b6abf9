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

#include "tagvalid/vqmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

double squared_distance(const MfccFrame& a, const MfccFrame& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    d += x * x;
  }
  return d;
}

std::size_t distinct_count(std::span<const MfccFrame> frames, std::size_t enough) {
  std::vector<MfccFrame> sorted(frames.begin(), frames.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < sorted.size() && distinct < enough; ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) ++distinct;
  }
  return distinct;
}

std::vector<MfccFrame> seed_plus_plus(std::span<const MfccFrame> frames, std::size_t k, Rng& rng) {
  std::vector<MfccFrame> centers;
  centers.reserve(k);
  centers.push_back(frames[static_cast<std::size_t>(rng.below(frames.size()))]);
  std::vector<double> nearest(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) nearest[i] = squared_distance(frames[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = frames.size() - 1;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        running += nearest[i];
        if (running > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can land on an already chosen point; take the farthest one.
      if (nearest[pick] <= 0.0) {
        pick = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
      }
    }
    centers.push_back(frames[pick]);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(frames[i], centers.back()));
    }
  }
  return centers;
}

}  // namespace

KMeansResult train_codebook(std::span<const MfccFrame> frames, std::size_t k, std::uint64_t seed,
                            const KMeansOptions& options) {
  if (k == 0) throw Error(ErrorKind::kData, "codebook size must be positive");
  if (distinct_count(frames, k) < k) {
    throw Error(ErrorKind::kData, "fewer than " + std::to_string(k) + " distinct frames");
  }
  Rng rng(seed);
  KMeansResult result;
  result.codebook.seed = seed;
  auto& centers = result.codebook.centroids;
  centers = seed_plus_plus(frames, k, rng);

  std::vector<std::uint32_t> assignment(frames.size(), 0);
  std::vector<MfccFrame> sums(k);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      assignment[i] = encode_frame(result.codebook, frames[i]);
      objective += squared_distance(frames[i], centers[assignment[i]]);
    }
    result.objective.push_back(objective);
    result.iterations = iter + 1;

    std::fill(sums.begin(), sums.end(), MfccFrame{});
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      auto& s = sums[assignment[i]];
      for (std::size_t d = 0; d < s.size(); ++d) s[d] += frames[i][d];
      ++counts[assignment[i]];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      MfccFrame next;
      for (std::size_t d = 0; d < next.size(); ++d) next[d] = sums[c][d] / static_cast<double>(counts[c]);
      movement = std::max(movement, std::sqrt(squared_distance(next, centers[c])));
      centers[c] = next;
    }
    if (movement < options.tolerance) break;
  }
  return result;
}

std::uint32_t encode_frame(const Codebook& codebook, const MfccFrame& frame) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.centroids.size(); ++c) {
    const double d = squared_distance(frame, codebook.centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

std::vector<std::uint32_t> encode(const Codebook& codebook, const MfccSequence& sequence) {
  std::vector<std::uint32_t> codes;
  codes.reserve(sequence.frames.size());
  for (const auto& f : sequence.frames) codes.push_back(encode_frame(codebook, f));
  return codes;
}

double MarkovModel::log_probability(std::span<const std::uint32_t> codes) const {
  if (codes.empty()) return 0.0;
  double lp = log_initial.at(codes[0]);
  for (std::size_t i = 1; i < codes.size(); ++i) lp += log_transition_at(codes[i - 1], codes[i]);
  return lp;
}

MarkovModel train_markov(std::span<const CodeSequence> sequences, std::size_t symbols, double smoothing) {
  if (symbols == 0) throw Error(ErrorKind::kData, "alphabet must be nonempty");
  const bool usable = std::any_of(sequences.begin(), sequences.end(), [](const auto& s) { return s.size() >= 2; });
  if (!usable) throw Error(ErrorKind::kData, "Markov training needs a sequence of length >= 2");

  std::vector<double> initial(symbols, 0.0), transition(symbols * symbols, 0.0);
  for (const auto& seq : sequences) {
    if (seq.empty()) continue;
    for (auto c : seq) {
      if (c >= symbols) throw Error(ErrorKind::kData, "code outside the alphabet");
    }
    initial[seq[0]] += 1.0;
    for (std::size_t i = 1; i < seq.size(); ++i) transition[seq[i - 1] * symbols + seq[i]] += 1.0;
  }

  MarkovModel model;
  model.symbols = symbols;
  model.smoothing = smoothing;
  model.log_initial.resize(symbols);
  model.log_transition.resize(symbols * symbols);
  const auto normalize_row = [&](const double* counts, double* out) {
    double total = 0.0;
    for (std::size_t j = 0; j < symbols; ++j) total += counts[j] + smoothing;
    for (std::size_t j = 0; j < symbols; ++j) {
      out[j] = total > 0.0 ? std::log((counts[j] + smoothing) / total)
                           : -std::log(static_cast<double>(symbols));
    }
  };
  normalize_row(initial.data(), model.log_initial.data());
  for (std::size_t i = 0; i < symbols; ++i) {
    normalize_row(transition.data() + i * symbols, model.log_transition.data() + i * symbols);
  }
  return model;
}

VqmmScore score_vqmm(const MarkovModel& vocals, const MarkovModel& nonvocals,
                     std::span<const std::uint32_t> codes) {
  if (vocals.symbols != nonvocals.symbols) throw Error(ErrorKind::kShape, "models use different codebooks");
  VqmmScore s;
  s.log_p_vocals = vocals.log_probability(codes);
  s.log_p_nonvocals = nonvocals.log_probability(codes);
  s.label = s.log_p_nonvocals > s.log_p_vocals ? Label::kNonVocals : Label::kVocals;
  return s;
}

}  // namespace tagvalid
