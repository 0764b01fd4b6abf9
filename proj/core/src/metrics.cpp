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

#include "tagvalid/metrics.hpp"

#include <cstdio>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorKind::kShape, "prediction count " + std::to_string(predictions.size()) +
                                       " differs from truth count " + std::to_string(truths.size()));
  }
  ConfusionCounts c;
  for (std::size_t t = 0; t < kTagCount; ++t) {
    const Label tag = static_cast<Label>(t);
    auto& k = c.tags[t];
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const bool pred = predictions[i] == tag;
      const bool truth = truths[i] == tag;
      if (pred && truth) ++k.tp;
      else if (pred) ++k.fp;
      else if (truth) ++k.fn;
      else ++k.tn;
    }
  }
  return c;
}

Prf prf(const TagCounts& counts) {
  Prf out;
  out.precision = ratio(counts.tp, counts.tp + counts.fp);
  out.recall = ratio(counts.tp, counts.tp + counts.fn);
  out.f = harmonic(out.precision, out.recall);
  return out;
}

FomReport fom(const ConfusionCounts& counts) {
  FomReport r;
  TagCounts pooled;
  for (std::size_t t = 0; t < kTagCount; ++t) {
    r.per_tag[t] = prf(counts.tags[t]);
    r.macro.precision += r.per_tag[t].precision / kTagCount;
    r.macro.recall += r.per_tag[t].recall / kTagCount;
    r.mean_tag_f += r.per_tag[t].f / kTagCount;
    pooled.tp += counts.tags[t].tp;
    pooled.fp += counts.tags[t].fp;
    pooled.tn += counts.tags[t].tn;
    pooled.fn += counts.tags[t].fn;
  }
  r.macro.f = r.mean_tag_f;
  r.micro = prf(pooled);
  return r;
}

std::string FomReport::serialize() const {
  std::string out;
  char buf[96];
  auto line = [&](const std::string& key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", key.c_str(), v);
    out += buf;
  };
  for (std::size_t t = 0; t < kTagCount; ++t) {
    const std::string tag(to_string(static_cast<Label>(t)));
    line(tag + ".precision", per_tag[t].precision);
    line(tag + ".recall", per_tag[t].recall);
    line(tag + ".f", per_tag[t].f);
  }
  line("macro.precision", macro.precision);
  line("macro.recall", macro.recall);
  line("macro.f", macro.f);
  line("micro.precision", micro.precision);
  line("micro.recall", micro.recall);
  line("micro.f", micro.f);
  line("mean_tag_f", mean_tag_f);
  return out;
}

CrossFoldReport mirex_cross_fold(std::span<const FomReport> folds) {
  if (folds.empty()) throw Error(ErrorKind::kArity, "cross-fold aggregate needs at least one fold");
  CrossFoldReport r;
  r.folds = folds.size();
  const double n = static_cast<double>(folds.size());
  for (const auto& f : folds) {
    r.average_tag_precision += f.micro.precision / n;
    r.average_tag_recall += f.micro.recall / n;
    r.average_tag_f += harmonic(f.micro.precision, f.micro.recall) / n;
    r.mean_tag_f += f.mean_tag_f / n;
  }
  return r;
}

FomReport pooled_fom(std::span<const ConfusionCounts> folds) {
  ConfusionCounts sum;
  for (const auto& c : folds) {
    for (std::size_t t = 0; t < kTagCount; ++t) {
      sum.tags[t].tp += c.tags[t].tp;
      sum.tags[t].fp += c.tags[t].fp;
      sum.tags[t].tn += c.tags[t].tn;
      sum.tags[t].fn += c.tags[t].fn;
    }
  }
  return fom(sum);
}

}  // namespace tagvalid
