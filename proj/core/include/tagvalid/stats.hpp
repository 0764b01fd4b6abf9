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
#include <vector>

namespace tagvalid {

inline constexpr double kDefaultAlpha = 0.01;

// Correct counts on each tag: x of n_t Vocals instances, y of n_f Non-Vocals.
struct OutcomePair {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t n_t = 0;
  std::size_t n_f = 0;
};

struct ConsistencyResult {
  double p_value = 1.0;
  double argmax_p_t = 0.5;
};

// log P[X >= k] for X ~ Binomial(n, p), summed in log space.
double log_binomial_upper_tail(std::size_t n, std::size_t k, double p);

// Objective of the random-consistency test at one p_t:
// P[X >= x] * P[Y >= y], X ~ Bin(n_t, p_t), Y ~ Bin(n_f, 1 - p_t).
double random_consistency_at(const OutcomePair& o, double p_t);

// Maximum of random_consistency_at over p_t in [0, 1]: a 1001-point grid
// followed by golden-section refinement around the best grid point.
ConsistencyResult random_consistency_pvalue(const OutcomePair& o);

// a12: first system correct and second wrong; a21 the reverse.
struct PairedOutcome {
  std::size_t a12 = 0;
  std::size_t a21 = 0;

  std::size_t b() const { return a12 + a21; }
};

enum class PairDirection { kFirstBetter, kSecondBetter };

// Exact one-sided sign test: P[A >= a] with A ~ Binomial(b, 1/2), where a is
// a12 for kFirstBetter and a21 otherwise. b = 0 gives 1.
double paired_contradiction_pvalue(const PairedOutcome& po, PairDirection direction = PairDirection::kFirstBetter);
double sign_test_upper_tail(std::size_t a, std::size_t b);

// Boundary of the region a random system R(p_t) reaches with probability at
// least alpha: for each x, the largest y with P[X >= x] P[Y >= y] >= alpha.
// Entries are -1 when no y qualifies.
struct ConsistencyRegion {
  double p_t = 0.0;
  std::vector<long> max_y;  // indexed by x in [0, n_t]
};

std::vector<ConsistencyRegion> illustrative_regions(std::size_t n_t, std::size_t n_f, double alpha = kDefaultAlpha);

}  // namespace tagvalid
