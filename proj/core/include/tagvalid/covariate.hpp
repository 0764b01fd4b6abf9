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
#include <span>
#include <string>
#include <vector>

#include "tagvalid/features.hpp"

namespace tagvalid {

inline constexpr std::size_t kDefaultFrameSample = 20000;
inline constexpr std::size_t kDefaultEnsemble = 10;
inline constexpr std::size_t kPerceptronEpochs = 20;
inline constexpr double kDefaultDelta = 0.05;

// MFCC frames drawn from one side (0 = train, 1 = test) of a split.
struct FrameSample {
  std::vector<MfccFrame> frames;
  std::vector<std::uint32_t> origins;  // source clip index per frame
  int side = 0;

  std::size_t size() const { return frames.size(); }
};

// Uniform sampling without replacement over all frames of all clips.
FrameSample sample_frames(std::span<const MfccSequence> clips, std::size_t n, std::uint64_t seed, int side);

struct EnsembleOptions {
  std::size_t members = kDefaultEnsemble;
  std::size_t epochs = kPerceptronEpochs;
};

struct DivergenceEstimate {
  std::vector<double> errors;  // held-out domain error per perceptron
  double best_error = 0.5;
  double d_hat = 0.0;
};

// Trains perceptrons to tell U (label 0) from U' (label 1) on the first half
// of each sample and measures their error on the second halves.
// d_hat = clamp(2 * (1 - 2 * min error), 0, 2).
DivergenceEstimate empirical_divergence(const FrameSample& u, const FrameSample& u_prime, std::uint64_t seed,
                                        const EnsembleOptions& options = {});

// 4 * sqrt((vc_dim * ln(2m) + ln(2 / delta)) / m).
double divergence_bound_term(std::size_t m, std::size_t vc_dim, double delta = kDefaultDelta);
double divergence_bound(double d_hat, std::size_t m, std::size_t vc_dim, double delta = kDefaultDelta);

struct DivergenceReport {
  std::string label;
  DivergenceEstimate estimate;
  std::size_t m = 0;
  std::size_t vc_dim = kMfccCoeffs + 1;
  double delta = kDefaultDelta;
  double additive_term = 0.0;
  double bound = 0.0;

  // "key=value" lines, prefixed with the label when it is set.
  std::string serialize() const;
};

DivergenceReport make_report(std::string label, DivergenceEstimate estimate, std::size_t m,
                             std::size_t vc_dim = kMfccCoeffs + 1, double delta = kDefaultDelta);

}  // namespace tagvalid
