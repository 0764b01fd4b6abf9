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

#include <array>
#include <cstdint>
#include <span>

#include "tagvalid/features.hpp"
#include "tagvalid/label.hpp"

namespace tagvalid {

struct LabeledBff {
  BffVector features;
  Label label;
};

struct LinearBffOptions {
  std::size_t epochs = 200;
  double lambda = 1e-4;
};

// Affine separator over min/max-normalized bag-of-frames vectors. The last
// weight is the bias. Positive scores mean Vocals.
struct LinearBffModel {
  std::array<double, kBffDims + 1> weights{};
  std::array<double, kBffDims> min{};
  std::array<double, kBffDims> max{};
  std::uint64_t seed = 0;

  // Maps into [0, 1] per dimension using the training bounds; test values
  // are clamped and constant dimensions map to 0.
  std::array<double, kBffDims> normalize(const BffVector& v) const;
  double score(const BffVector& v) const;
};

// Hinge loss with L2 regularization, minimized by stochastic subgradient
// steps of size 1/(lambda * t) over a seeded shuffle each epoch.
LinearBffModel train_linear_bff(std::span<const LabeledBff> train, std::uint64_t seed,
                                const LinearBffOptions& options = {});

Label predict_linear(const LinearBffModel& model, const BffVector& v);

}  // namespace tagvalid
