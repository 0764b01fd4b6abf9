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
#include <cstddef>
#include <span>
#include <string>

#include "tagvalid/label.hpp"

namespace tagvalid {

inline constexpr std::size_t kTagCount = 2;

struct TagCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

// One-vs-rest counts per tag, indexed by label_index().
struct ConfusionCounts {
  std::array<TagCounts, kTagCount> tags{};
};

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Zero denominators give 0.
Prf prf(const TagCounts& counts);

struct FomReport {
  std::array<Prf, kTagCount> per_tag{};
  // Means over tags of per-tag precision, recall and F.
  Prf macro;
  Prf micro;
  // Mean of the per-tag F values; the scalar tracked by validity runs.
  double mean_tag_f = 0.0;

  // "key=value" lines.
  std::string serialize() const;
};

FomReport fom(const ConfusionCounts& counts);

struct CrossFoldReport {
  // Means over folds of micro precision and recall, and the mean of the
  // per-fold harmonic means of those two.
  double average_tag_precision = 0.0;
  double average_tag_recall = 0.0;
  double average_tag_f = 0.0;
  double mean_tag_f = 0.0;
  std::size_t folds = 0;
};

CrossFoldReport mirex_cross_fold(std::span<const FomReport> folds);
// Metrics recomputed from counts pooled over all folds.
FomReport pooled_fom(std::span<const ConfusionCounts> folds);

}  // namespace tagvalid
