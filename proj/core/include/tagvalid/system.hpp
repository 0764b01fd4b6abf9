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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tagvalid/features.hpp"
#include "tagvalid/label.hpp"
#include "tagvalid/linear_bff.hpp"
#include "tagvalid/srcam.hpp"
#include "tagvalid/vqmm.hpp"

namespace tagvalid {

enum class SystemVariant { kLinearBff, kVqmm, kSrcam };

inline constexpr SystemVariant kAllVariants[] = {SystemVariant::kLinearBff, SystemVariant::kVqmm,
                                                 SystemVariant::kSrcam};

std::string_view to_string(SystemVariant variant);
SystemVariant parse_variant(std::string_view text);
FeatureKind feature_kind(SystemVariant variant);

struct VqmmModel {
  Codebook codebook;
  MarkovModel vocals;
  MarkovModel nonvocals;
};

struct SrcamModel {
  SrcDictionary dictionary;
  double lambda = kSrcLambda;
  BpdnOptions bpdn;
};

struct Provenance {
  std::vector<int> training_folds;
  std::uint64_t seed = 0;
};

struct TrainingInstance {
  ClipFeatures features;
  Label label;
};

// One trained autotagger. Immutable after training; predict is pure.
class TrainedSystem {
 public:
  using Model = std::variant<LinearBffModel, VqmmModel, SrcamModel>;

  TrainedSystem(SystemVariant variant, Model model, Provenance provenance);

  SystemVariant variant() const { return variant_; }
  const Model& model() const { return model_; }
  const Provenance& provenance() const { return provenance_; }
  FeatureKind required_feature() const { return feature_kind(variant_); }

  Label predict(const ClipFeatures& features) const;
  Label predict(const AudioClip& clip) const;

  // Versioned text container; floating-point values are written in hex so
  // a round trip reproduces every prediction exactly.
  std::string serialize() const;
  static TrainedSystem parse(std::string_view text);

 private:
  SystemVariant variant_;
  Model model_;
  Provenance provenance_;
};

struct TrainingOptions {
  LinearBffOptions linear;
  std::size_t codebook_size = kCodebookSize;
  KMeansOptions kmeans;
  double markov_smoothing = 1.0;
  double src_lambda = kSrcLambda;
  BpdnOptions bpdn;
};

TrainedSystem train_system(SystemVariant variant, std::span<const TrainingInstance> train,
                           const Provenance& provenance, const TrainingOptions& options = {});

}  // namespace tagvalid
