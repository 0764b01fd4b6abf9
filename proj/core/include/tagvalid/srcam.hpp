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

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "tagvalid/features.hpp"
#include "tagvalid/label.hpp"

namespace tagvalid {

inline constexpr double kSrcEpsilonSq = 0.01;
inline constexpr double kSrcLambda = 0.25;

struct LabeledAm {
  AmVector features;
  Label label;
};

// Feature atoms are the training AM vectors mapped into [0, 1] per dimension
// with the training min/max; tag atoms are the unit-norm one-hot labels.
struct SrcDictionary {
  Eigen::MatrixXd atoms;      // kAmDims x n
  Eigen::MatrixXd tag_atoms;  // 2 x n
  Eigen::VectorXd min;
  Eigen::VectorXd max;
  // atoms^T atoms and its largest eigenvalue, filled by prepare().
  Eigen::MatrixXd gram;
  double lipschitz = 0.0;

  void prepare();

  std::size_t size() const { return static_cast<std::size_t>(atoms.cols()); }
  // Min/max mapping (constant dimensions -> 0) followed by unit-norm scaling.
  // A zero vector stays zero.
  Eigen::VectorXd normalize_query(const AmVector& v) const;
};

SrcDictionary build_dictionary(std::span<const LabeledAm> train);

struct BpdnOptions {
  double epsilon_sq = kSrcEpsilonSq;
  std::size_t max_iters = 200;      // per penalty value
  std::size_t max_bisections = 20;
  double min_penalty_ratio = 1e-4;  // smallest penalty, relative to ||D^T f||_inf
};

struct BpdnResult {
  Eigen::VectorXd coefficients;
  double residual_sq = 0.0;
  bool feasible = false;
  std::size_t iterations = 0;
  // l1 norm of every accepted feasible iterate, in acceptance order.
  std::vector<double> accepted_l1;
};

// Approximately minimizes ||s||_1 subject to ||f - D s||_2^2 <= epsilon^2.
// Penalized problems min 0.5||f - Ds||^2 + mu||s||_1 are solved by FISTA and
// mu is bisected (log scale) to the largest value meeting the constraint.
// When no penalty value is feasible the smallest-penalty iterate is
// returned with feasible = false.
BpdnResult solve_bpdn(const Eigen::MatrixXd& dictionary, const Eigen::VectorXd& f,
                      const BpdnOptions& options = {});
// Same, with the Gram matrix and its largest eigenvalue precomputed.
BpdnResult solve_bpdn(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& gram, double lipschitz,
                      const Eigen::VectorXd& f, const BpdnOptions& options = {});

struct TagDecision {
  Label label = kTieLabel;
  std::array<double, 2> weights{};  // w = tag atoms * s, [vocals, non-vocals]
  std::array<int, 2> tags{};         // T_lambda(w / ||w||_inf)
  bool degenerate = false;          // w == 0
};

// Two-tag reading of the thresholded tag vector: a single surviving tag
// wins; otherwise argmax of w (ties to Vocals).
TagDecision threshold_tags(std::array<double, 2> w, double lambda = kSrcLambda);

struct SrcamPrediction {
  TagDecision decision;
  BpdnResult solve;
};

SrcamPrediction predict_srcam(const SrcDictionary& dictionary, const AmVector& v, double lambda = kSrcLambda,
                              const BpdnOptions& options = {});

}  // namespace tagvalid
