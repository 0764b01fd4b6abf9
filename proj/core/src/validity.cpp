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

#include "tagvalid/validity.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

struct Snapshot {
  OutcomePair outcome;
  FomReport fom;
  std::size_t correct = 0;
};

Snapshot snapshot(std::span<const Label> predictions, std::span<const Label> truths) {
  Snapshot s;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool right = predictions[i] == truths[i];
    if (truths[i] == Label::kVocals) {
      ++s.outcome.n_t;
      s.outcome.x += right;
    } else {
      ++s.outcome.n_f;
      s.outcome.y += right;
    }
    s.correct += right;
  }
  s.fom = fom(confusion(predictions, truths));
  return s;
}

IterationRecord make_record(std::size_t iteration, std::uint64_t seed, const Snapshot& s, double p) {
  IterationRecord r;
  r.iteration = iteration;
  r.seed = seed;
  r.outcome = s.outcome;
  r.fom = s.fom;
  r.p_value = p;
  r.correct = s.correct;
  return r;
}

std::uint64_t filter_seed(std::uint64_t run_seed, std::size_t iteration, std::size_t candidate) {
  return mix_seed(mix_seed(run_seed, iteration), candidate);
}

void check_inputs(const InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                  std::size_t min_systems) {
  criteria.validate();
  if (test.ids.size() != test.truths.size()) throw Error(ErrorKind::kShape, "test ids and labels differ in length");
  if (predictor.instances() != test.size()) {
    throw Error(ErrorKind::kShape, "predictor covers " + std::to_string(predictor.instances()) +
                                       " instances, test set has " + std::to_string(test.size()));
  }
  if (predictor.systems() < min_systems) {
    throw Error(ErrorKind::kArity, "run needs " + std::to_string(min_systems) + " systems");
  }
}

// Shared loop of deflation and inflation. `active` selects the instances
// that are refiltered, i.e. the correct ones for deflation and the wrong
// ones for inflation.
ValidityRunLog refilter_run(RunKind kind, InstancePredictor& predictor, const TestSet& test,
                            const StopCriteria& criteria, std::uint64_t seed) {
  check_inputs(predictor, test, criteria, 1);
  const bool deflating = kind == RunKind::kDeflate;
  ValidityRunLog log;
  log.kind = kind;
  log.seed = seed;
  log.criteria = criteria;
  log.transforms = TransformSet(test.ids);

  std::vector<Label> preds(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) preds[i] = predictor.predict(i, nullptr)[0];

  auto evaluate = [&](std::size_t iteration, std::uint64_t filter) {
    const Snapshot s = snapshot(preds, test.truths);
    const double p = random_consistency_pvalue(s.outcome).p_value;
    log.iterations.push_back(make_record(iteration, filter, s, p));
    return s;
  };
  auto done = [&](const Snapshot& s) {
    if (deflating) return log.iterations.back().p_value >= criteria.alpha;
    return s.fom.mean_tag_f >= criteria.f_target || s.correct == test.size();
  };

  const Snapshot base = evaluate(0, 0);
  const bool vacuous = deflating ? log.iterations.back().p_value >= criteria.alpha : base.correct == test.size();
  if (vacuous) {
    log.termination = Termination::kVacuous;
    return log;
  }
  if (done(base)) {
    log.termination = Termination::kSuccess;
    return log;
  }

  log.termination = Termination::kExhausted;
  for (std::size_t it = 1; it <= criteria.max_iterations; ++it) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if ((preds[i] == test.truths[i]) == deflating) active.push_back(i);
    }

    FilterSpec best;
    std::vector<Label> best_preds;
    std::size_t best_moved = 0;
    for (std::size_t c = 0; c < criteria.candidates; ++c) {
      FilterSpec g = sample_irrelevant_filter(filter_seed(seed, it, c));
      std::vector<Label> out(active.size());
      std::size_t moved = 0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        out[j] = predictor.predict(active[j], &g)[0];
        moved += (out[j] == test.truths[active[j]]) != deflating;
      }
      if (c == 0 || moved > best_moved) {
        best = std::move(g);
        best_preds = std::move(out);
        best_moved = moved;
      }
    }

    std::vector<std::string> ids;
    ids.reserve(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
      preds[active[j]] = best_preds[j];
      log.transforms.assign(test.ids[active[j]], best);
      ids.push_back(test.ids[active[j]]);
    }
    const Snapshot s = evaluate(it, best.seed);
    log.iterations.back().retransformed = std::move(ids);
    if (done(s)) {
      log.termination = Termination::kSuccess;
      break;
    }
  }
  return log;
}

// 2: winner right and loser wrong; 1: both right or both wrong; 0: reverse.
int pair_state(Label winner, Label loser, Label truth) {
  const bool w = winner == truth;
  const bool l = loser == truth;
  if (w && !l) return 2;
  if (!w && l) return 0;
  return 1;
}

}  // namespace

void StopCriteria::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::kConfig, "alpha must lie in (0, 1)");
  if (!(f_target > 0.0 && f_target <= 1.0)) throw Error(ErrorKind::kConfig, "F target must lie in (0, 1]");
  if (candidates == 0) throw Error(ErrorKind::kConfig, "at least one candidate filter per iteration");
}

AudioPredictor::AudioPredictor(std::vector<const TrainedSystem*> systems, std::span<const AudioClip> clips,
                               const FilterbankDesign& design)
    : systems_(std::move(systems)), clips_(clips), design_(design), unfiltered_(clips.size()) {
  for (const auto* s : systems_) {
    if (std::find(kinds_.begin(), kinds_.end(), s->required_feature()) == kinds_.end()) {
      kinds_.push_back(s->required_feature());
    }
  }
}

std::vector<Label> AudioPredictor::run(const AudioClip& clip) const {
  const ClipFeatures features = extract_features(clip, kinds_);
  std::vector<Label> out;
  out.reserve(systems_.size());
  for (const auto* s : systems_) out.push_back(s->predict(features));
  return out;
}

std::vector<Label> AudioPredictor::predict(std::size_t instance, const FilterSpec* spec) {
  if (instance >= clips_.size()) throw Error(ErrorKind::kShape, "instance index out of range");
  if (spec == nullptr) {
    if (unfiltered_[instance].empty()) unfiltered_[instance] = run(clips_[instance]);
    return unfiltered_[instance];
  }
  if (!kernel_ || kernel_seed_ != spec->seed || kernel_spec_.gains != spec->gains) {
    kernel_ = std::make_unique<FilterKernel>(*spec, design_);
    kernel_seed_ = spec->seed;
    kernel_spec_ = *spec;
  }
  const AudioClip& clip = clips_[instance];
  AudioClip filtered{clip.id, kernel_->apply(clip.samples), clip.sample_rate};
  return run(filtered);
}

std::string_view to_string(RunKind kind) {
  switch (kind) {
    case RunKind::kDeflate: return "deflate";
    case RunKind::kInflate: return "inflate";
    case RunKind::kPairwise: return "pairwise";
  }
  return "unknown";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::kSuccess: return "success";
    case Termination::kExhausted: return "exhausted";
    case Termination::kVacuous: return "vacuous";
  }
  return "unknown";
}

std::string ValidityRunLog::csv() const {
  std::string out = "iteration,seed,n_retransformed,x,y,p_value,macroF,microF";
  const bool pairwise = kind == RunKind::kPairwise;
  if (pairwise) out += ",a12,a21,frozen";
  out += '\n';
  char buf[256];
  for (const auto& r : iterations) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%zu,%zu,%zu,%.17g,%.17g,%.17g", r.iteration,
                  static_cast<unsigned long long>(r.seed), r.retransformed.size(), r.outcome.x, r.outcome.y,
                  r.p_value, r.fom.macro.f, r.fom.micro.f);
    out += buf;
    if (pairwise) {
      std::snprintf(buf, sizeof buf, ",%zu,%zu,%zu", r.a12, r.a21, r.frozen);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string ValidityRunLog::plot_csv() const {
  std::string out = "iteration,mean_tag_f,x_frac,y_frac\n";
  char buf[160];
  for (const auto& r : iterations) {
    const double xf = r.outcome.n_t ? static_cast<double>(r.outcome.x) / r.outcome.n_t : 0.0;
    const double yf = r.outcome.n_f ? static_cast<double>(r.outcome.y) / r.outcome.n_f : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.iteration, r.fom.mean_tag_f, xf, yf);
    out += buf;
  }
  return out;
}

ValidityRunLog deflate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                       std::uint64_t seed) {
  return refilter_run(RunKind::kDeflate, predictor, test, criteria, seed);
}

ValidityRunLog inflate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                       std::uint64_t seed) {
  return refilter_run(RunKind::kInflate, predictor, test, criteria, seed);
}

ValidityRunLog pairwise_dominate(InstancePredictor& predictor, const TestSet& test, const StopCriteria& criteria,
                                 std::uint64_t seed) {
  check_inputs(predictor, test, criteria, 2);
  ValidityRunLog log;
  log.kind = RunKind::kPairwise;
  log.seed = seed;
  log.criteria = criteria;
  log.transforms = TransformSet(test.ids);

  const std::size_t n = test.size();
  std::vector<Label> winner(n), loser(n);
  std::vector<int> state(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = predictor.predict(i, nullptr);
    winner[i] = p[0];
    loser[i] = p[1];
    state[i] = pair_state(p[0], p[1], test.truths[i]);
  }

  auto evaluate = [&](std::size_t iteration, std::uint64_t filter) {
    PairedOutcome po;
    std::size_t frozen = 0;
    for (int s : state) {
      po.a12 += s == 2;
      po.a21 += s == 0;
      frozen += s == 2;
    }
    const Snapshot snap = snapshot(winner, test.truths);
    IterationRecord r = make_record(iteration, filter, snap, paired_contradiction_pvalue(po));
    r.a12 = po.a12;
    r.a21 = po.a21;
    r.frozen = frozen;
    log.iterations.push_back(std::move(r));
    return log.iterations.back().p_value < criteria.alpha;
  };

  if (evaluate(0, 0)) {
    log.termination = Termination::kSuccess;
    return log;
  }
  log.termination = Termination::kExhausted;
  for (std::size_t it = 1; it <= criteria.max_iterations; ++it) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] != 2) open.push_back(i);
    }

    FilterSpec best;
    std::vector<std::pair<Label, Label>> best_preds;
    long best_gain = -1;
    for (std::size_t c = 0; c < criteria.candidates; ++c) {
      FilterSpec g = sample_irrelevant_filter(filter_seed(seed, it, c));
      std::vector<std::pair<Label, Label>> out(open.size());
      long gain = 0;
      for (std::size_t j = 0; j < open.size(); ++j) {
        const auto p = predictor.predict(open[j], &g);
        out[j] = {p[0], p[1]};
        gain += std::max(0, pair_state(p[0], p[1], test.truths[open[j]]) - state[open[j]]);
      }
      if (gain > best_gain) {
        best = std::move(g);
        best_preds = std::move(out);
        best_gain = gain;
      }
    }

    std::vector<std::string> accepted;
    for (std::size_t j = 0; j < open.size(); ++j) {
      const std::size_t i = open[j];
      const int s = pair_state(best_preds[j].first, best_preds[j].second, test.truths[i]);
      if (s > state[i]) {
        state[i] = s;
        winner[i] = best_preds[j].first;
        loser[i] = best_preds[j].second;
        log.transforms.assign(test.ids[i], best);
        accepted.push_back(test.ids[i]);
      }
    }
    const bool reached = evaluate(it, best.seed);
    log.iterations.back().retransformed = std::move(accepted);
    if (reached) {
      log.termination = Termination::kSuccess;
      break;
    }
  }
  return log;
}

std::vector<std::vector<Label>> replay(InstancePredictor& predictor, const TestSet& test,
                                       const TransformSet& transforms) {
  std::vector<std::vector<Label>> out(predictor.systems(), std::vector<Label>(test.size()));
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto p = predictor.predict(i, transforms.find(test.ids[i]));
    for (std::size_t s = 0; s < p.size(); ++s) out[s][i] = p[s];
  }
  return out;
}

}  // namespace tagvalid
