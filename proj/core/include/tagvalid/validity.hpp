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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tagvalid/audio.hpp"
#include "tagvalid/label.hpp"
#include "tagvalid/metrics.hpp"
#include "tagvalid/stats.hpp"
#include "tagvalid/system.hpp"
#include "tagvalid/transform.hpp"

namespace tagvalid {

struct StopCriteria {
  double alpha = kDefaultAlpha;
  double f_target = 0.95;
  std::size_t max_iterations = 50;
  // Filters drawn per iteration; the one moving most instances is kept.
  std::size_t candidates = 1;

  void validate() const;
};

// Predictions of one or more fixed systems for a test instance whose audio
// is passed through a filter (nullptr means unfiltered).
class InstancePredictor {
 public:
  virtual ~InstancePredictor() = default;
  virtual std::size_t instances() const = 0;
  virtual std::size_t systems() const = 0;
  virtual std::vector<Label> predict(std::size_t instance, const FilterSpec* spec) = 0;
};

// Filters the clip, extracts the features the systems need and predicts.
// Unfiltered predictions are memoized.
class AudioPredictor final : public InstancePredictor {
 public:
  AudioPredictor(std::vector<const TrainedSystem*> systems, std::span<const AudioClip> clips,
                 const FilterbankDesign& design);

  std::size_t instances() const override { return clips_.size(); }
  std::size_t systems() const override { return systems_.size(); }
  std::vector<Label> predict(std::size_t instance, const FilterSpec* spec) override;

 private:
  std::vector<Label> run(const AudioClip& clip) const;

  std::vector<const TrainedSystem*> systems_;
  std::span<const AudioClip> clips_;
  const FilterbankDesign& design_;
  std::vector<FeatureKind> kinds_;
  std::vector<std::vector<Label>> unfiltered_;
  std::uint64_t kernel_seed_ = 0;
  FilterSpec kernel_spec_;
  std::unique_ptr<FilterKernel> kernel_;
};

struct TestSet {
  std::vector<std::string> ids;
  std::vector<Label> truths;

  std::size_t size() const { return ids.size(); }
};

enum class RunKind { kDeflate, kInflate, kPairwise };
enum class Termination { kSuccess, kExhausted, kVacuous };

std::string_view to_string(RunKind kind);
std::string_view to_string(Termination termination);

struct IterationRecord {
  std::size_t iteration = 0;
  std::uint64_t seed = 0;  // 0 for the unfiltered baseline row
  std::vector<std::string> retransformed;
  // First system's outcome and figures of merit.
  OutcomePair outcome;
  FomReport fom;
  double p_value = 1.0;
  std::size_t correct = 0;
  // Pairwise runs only.
  std::size_t a12 = 0;
  std::size_t a21 = 0;
  std::size_t frozen = 0;
};

struct ValidityRunLog {
  RunKind kind = RunKind::kDeflate;
  std::uint64_t seed = 0;
  StopCriteria criteria;
  // Row 0 is the unfiltered baseline.
  std::vector<IterationRecord> iterations;
  TransformSet transforms;
  Termination termination = Termination::kExhausted;

  std::size_t iteration_count() const { return iterations.empty() ? 0 : iterations.size() - 1; }
  const IterationRecord& final_record() const { return iterations.back(); }

  // iteration,seed,n_retransformed,x,y,p_value,macroF,microF[,a12,a21,frozen]
  std::string csv() const;
  // iteration,mean_tag_f,x_frac,y_frac; one row per iteration including row 0.
  std::string plot_csv() const;
};

// Refilters every currently correct instance with one fresh
// filter per iteration; instances that become wrong keep that filter.
// Succeeds once the outcome is consistent with a random system.
ValidityRunLog deflate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                       std::uint64_t seed);

// The mirror image of deflate over incorrect instances; succeeds once the
// mean per-tag F reaches the target.
ValidityRunLog inflate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                       std::uint64_t seed);

// Makes system 0 of the predictor significantly better than system 1.
// Instances where the winner is right and the loser wrong are frozen; every
// other instance keeps a new filter only if it moves the pair strictly
// closer to that state.
ValidityRunLog pairwise_dominate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                                 std::uint64_t seed);

// Labels of every system under the final transforms, recomputed from scratch.
std::vector<std::vector<Label>> replay(InstancePredictor& predictor, const TestSet& test,
                                       const TransformSet& transforms);

}  // namespace tagvalid
