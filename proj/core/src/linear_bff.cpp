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

#include "tagvalid/linear_bff.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {

std::array<double, kBffDims> LinearBffModel::normalize(const BffVector& v) const {
  std::array<double, kBffDims> out{};
  for (std::size_t d = 0; d < kBffDims; ++d) {
    const double range = max[d] - min[d];
    out[d] = range > 0.0 ? std::clamp((v.values[d] - min[d]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

double LinearBffModel::score(const BffVector& v) const {
  const auto x = normalize(v);
  double s = weights[kBffDims];
  for (std::size_t d = 0; d < kBffDims; ++d) s += weights[d] * x[d];
  return s;
}

LinearBffModel train_linear_bff(std::span<const LabeledBff> train, std::uint64_t seed,
                                const LinearBffOptions& options) {
  const bool has_vocals = std::any_of(train.begin(), train.end(), [](const auto& e) { return e.label == Label::kVocals; });
  const bool has_non = std::any_of(train.begin(), train.end(), [](const auto& e) { return e.label == Label::kNonVocals; });
  if (!has_vocals || !has_non) {
    throw Error(ErrorKind::kDegenerateTraining, "linear training set must contain both labels");
  }

  LinearBffModel model;
  model.seed = seed;
  model.min.fill(std::numeric_limits<double>::infinity());
  model.max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& e : train) {
    for (std::size_t d = 0; d < kBffDims; ++d) {
      model.min[d] = std::min(model.min[d], e.features.values[d]);
      model.max[d] = std::max(model.max[d], e.features.values[d]);
    }
  }

  const std::size_t n = train.size();
  std::vector<std::array<double, kBffDims + 1>> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = model.normalize(train[i].features);
    std::copy(x.begin(), x.end(), xs[i].begin());
    xs[i][kBffDims] = 1.0;
    ys[i] = train[i].label == Label::kVocals ? 1.0 : -1.0;
  }

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto& w = model.weights;
  w.fill(0.0);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (options.lambda * static_cast<double>(t));
      double margin = 0.0;
      for (std::size_t d = 0; d <= kBffDims; ++d) margin += w[d] * xs[i][d];
      margin *= ys[i];
      const double shrink = 1.0 - eta * options.lambda;
      for (double& wd : w) wd *= shrink;
      if (margin < 1.0) {
        for (std::size_t d = 0; d <= kBffDims; ++d) w[d] += eta * ys[i] * xs[i][d];
      }
    }
  }
  return model;
}

Label predict_linear(const LinearBffModel& model, const BffVector& v) {
  return model.score(v) >= 0.0 ? Label::kVocals : Label::kNonVocals;
}

}  // namespace tagvalid
