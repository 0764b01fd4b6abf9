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

#include "tagvalid/srcam.hpp"

#include <algorithm>
#include <cmath>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

struct PenalizedSolve {
  Eigen::VectorXd s;
  std::size_t iterations = 0;
};

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// FISTA on 0.5 * ||f - D s||^2 + mu * ||s||_1 using only the Gram matrix.
PenalizedSolve fista(const Eigen::MatrixXd& gram, const Eigen::VectorXd& correlation, double lipschitz,
                     double mu, const Eigen::VectorXd& start, std::size_t max_iters) {
  PenalizedSolve out;
  Eigen::VectorXd s = start;
  Eigen::VectorXd y = s;
  Eigen::VectorXd next(s.size());
  double t = 1.0;
  const double step = 1.0 / lipschitz;
  for (std::size_t k = 0; k < max_iters; ++k) {
    const Eigen::VectorXd grad = gram * y - correlation;
    for (Eigen::Index i = 0; i < s.size(); ++i) next[i] = soft(y[i] - step * grad[i], mu * step);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double change = (next - s).cwiseAbs().maxCoeff();
    y = next + ((t - 1.0) / t_next) * (next - s);
    s = next;
    t = t_next;
    out.iterations = k + 1;
    if (change <= 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff())) break;
  }
  out.s = std::move(s);
  return out;
}

double residual_sq(const Eigen::MatrixXd& gram, const Eigen::VectorXd& correlation, double f_sq,
                   const Eigen::VectorXd& s) {
  return std::max(0.0, f_sq - 2.0 * correlation.dot(s) + s.dot(gram * s));
}

double largest_eigenvalue(const Eigen::MatrixXd& gram) {
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

void SrcDictionary::prepare() {
  gram = atoms.transpose() * atoms;
  lipschitz = largest_eigenvalue(gram);
}

Eigen::VectorXd SrcDictionary::normalize_query(const AmVector& v) const {
  Eigen::VectorXd f(static_cast<Eigen::Index>(kAmDims));
  for (Eigen::Index d = 0; d < f.size(); ++d) {
    const double range = max[d] - min[d];
    f[d] = range > 0.0 ? (v.values[static_cast<std::size_t>(d)] - min[d]) / range : 0.0;
  }
  const double norm = f.norm();
  if (norm > 0.0) f /= norm;
  return f;
}

SrcDictionary build_dictionary(std::span<const LabeledAm> train) {
  if (train.size() < 2) throw Error(ErrorKind::kData, "dictionary needs at least 2 training instances");
  const bool has_vocals = std::any_of(train.begin(), train.end(), [](const auto& e) { return e.label == Label::kVocals; });
  const bool has_non = std::any_of(train.begin(), train.end(), [](const auto& e) { return e.label == Label::kNonVocals; });
  if (!has_vocals || !has_non) throw Error(ErrorKind::kData, "dictionary needs both labels");

  const auto dims = static_cast<Eigen::Index>(kAmDims);
  const auto n = static_cast<Eigen::Index>(train.size());
  SrcDictionary dict;
  Eigen::MatrixXd raw(dims, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index d = 0; d < dims; ++d) raw(d, j) = train[static_cast<std::size_t>(j)].features.values[static_cast<std::size_t>(d)];
  }
  dict.min = raw.rowwise().minCoeff();
  dict.max = raw.rowwise().maxCoeff();
  dict.atoms.resize(dims, n);
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double range = dict.max[d] - dict.min[d];
    for (Eigen::Index j = 0; j < n; ++j) dict.atoms(d, j) = range > 0.0 ? (raw(d, j) - dict.min[d]) / range : 0.0;
  }
  // One-hot tag atoms already have unit norm.
  dict.tag_atoms = Eigen::MatrixXd::Zero(2, n);
  for (Eigen::Index j = 0; j < n; ++j) dict.tag_atoms(label_index(train[static_cast<std::size_t>(j)].label), j) = 1.0;
  dict.prepare();
  return dict;
}

BpdnResult solve_bpdn(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& gram, double lipschitz,
                      const Eigen::VectorXd& f, const BpdnOptions& options) {
  if (dictionary.rows() != f.size()) throw Error(ErrorKind::kShape, "query and dictionary dimensions differ");
  const Eigen::Index n = dictionary.cols();
  BpdnResult result;
  result.coefficients = Eigen::VectorXd::Zero(n);
  const double f_sq = f.squaredNorm();
  result.residual_sq = f_sq;
  if (f_sq <= options.epsilon_sq) {
    result.feasible = true;
    result.accepted_l1.push_back(0.0);
    return result;
  }
  const Eigen::VectorXd correlation = dictionary.transpose() * f;
  const double mu_max = correlation.cwiseAbs().maxCoeff();
  if (mu_max <= 0.0 || lipschitz <= 0.0) return result;  // f is orthogonal to every atom

  // Smallest penalty first: if even that misses the constraint, nothing will.
  double lo = mu_max * options.min_penalty_ratio;
  double hi = mu_max;
  PenalizedSolve current = fista(gram, correlation, lipschitz, lo, result.coefficients, options.max_iters);
  result.iterations += current.iterations;
  double r = residual_sq(gram, correlation, f_sq, current.s);
  result.coefficients = current.s;
  result.residual_sq = r;
  if (r > options.epsilon_sq) return result;
  result.feasible = true;
  double best_l1 = current.s.lpNorm<1>();
  result.accepted_l1.push_back(best_l1);

  Eigen::VectorXd warm = current.s;
  for (std::size_t b = 1; b < options.max_bisections; ++b) {
    const double mid = std::sqrt(lo * hi);
    current = fista(gram, correlation, lipschitz, mid, warm, options.max_iters);
    result.iterations += current.iterations;
    r = residual_sq(gram, correlation, f_sq, current.s);
    if (r <= options.epsilon_sq) {
      lo = mid;
      warm = current.s;
      const double l1 = current.s.lpNorm<1>();
      if (l1 <= best_l1) {
        best_l1 = l1;
        result.coefficients = current.s;
        result.residual_sq = r;
        result.accepted_l1.push_back(l1);
      }
    } else {
      hi = mid;
    }
  }
  return result;
}

BpdnResult solve_bpdn(const Eigen::MatrixXd& dictionary, const Eigen::VectorXd& f, const BpdnOptions& options) {
  const Eigen::MatrixXd gram = dictionary.transpose() * dictionary;
  return solve_bpdn(dictionary, gram, largest_eigenvalue(gram), f, options);
}

TagDecision threshold_tags(std::array<double, 2> w, double lambda) {
  TagDecision d;
  d.weights = w;
  const double inf_norm = std::max(std::abs(w[0]), std::abs(w[1]));
  if (inf_norm == 0.0) {
    d.degenerate = true;
    d.label = kTieLabel;
    return d;
  }
  for (int i = 0; i < 2; ++i) d.tags[i] = (w[i] / inf_norm > lambda) ? 1 : 0;
  if (d.tags[0] != d.tags[1]) {
    d.label = d.tags[0] ? Label::kVocals : Label::kNonVocals;
  } else {
    d.label = w[1] > w[0] ? Label::kNonVocals : Label::kVocals;
  }
  return d;
}

SrcamPrediction predict_srcam(const SrcDictionary& dictionary, const AmVector& v, double lambda,
                              const BpdnOptions& options) {
  SrcamPrediction out;
  const Eigen::VectorXd f = dictionary.normalize_query(v);
  out.solve = solve_bpdn(dictionary.atoms, dictionary.gram, dictionary.lipschitz, f, options);
  const Eigen::VectorXd w = dictionary.tag_atoms * out.solve.coefficients;
  out.decision = threshold_tags({w[0], w[1]}, lambda);
  return out;
}

}  // namespace tagvalid
