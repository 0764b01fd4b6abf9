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

#include "tagvalid/covariate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

constexpr std::size_t kDims = kMfccCoeffs;

struct Standardizer {
  std::array<double, kDims> mean{};
  std::array<double, kDims> inv_std{};

  std::array<double, kDims> operator()(const MfccFrame& f) const {
    std::array<double, kDims> out;
    for (std::size_t d = 0; d < kDims; ++d) out[d] = (f[d] - mean[d]) * inv_std[d];
    return out;
  }
};

Standardizer fit_standardizer(std::span<const MfccFrame> a, std::span<const MfccFrame> b) {
  Standardizer s;
  std::array<double, kDims> sq{};
  const double n = static_cast<double>(a.size() + b.size());
  for (auto part : {a, b}) {
    for (const auto& f : part) {
      for (std::size_t d = 0; d < kDims; ++d) s.mean[d] += f[d] / n;
    }
  }
  for (auto part : {a, b}) {
    for (const auto& f : part) {
      for (std::size_t d = 0; d < kDims; ++d) sq[d] += (f[d] - s.mean[d]) * (f[d] - s.mean[d]) / n;
    }
  }
  for (std::size_t d = 0; d < kDims; ++d) s.inv_std[d] = sq[d] > 0.0 ? 1.0 / std::sqrt(sq[d]) : 0.0;
  return s;
}

struct Example {
  std::array<double, kDims> x;
  double y;  // -1 for U, +1 for U'
};

// Averaged perceptron; the last weight is the bias.
std::array<double, kDims + 1> train_perceptron(std::span<const Example> data, std::size_t epochs,
                                               std::uint64_t seed) {
  std::array<double, kDims + 1> w{}, sum{};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  double count = 0.0;
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const Example& ex = data[i];
      double score = w[kDims];
      for (std::size_t d = 0; d < kDims; ++d) score += w[d] * ex.x[d];
      if (ex.y * score <= 0.0) {
        for (std::size_t d = 0; d < kDims; ++d) w[d] += ex.y * ex.x[d];
        w[kDims] += ex.y;
      }
      for (std::size_t d = 0; d <= kDims; ++d) sum[d] += w[d];
      count += 1.0;
    }
  }
  for (auto& v : sum) v /= count;
  return sum;
}

}  // namespace

FrameSample sample_frames(std::span<const MfccSequence> clips, std::size_t n, std::uint64_t seed, int side) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> index;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    for (std::size_t f = 0; f < clips[c].frames.size(); ++f) {
      index.emplace_back(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(f));
    }
  }
  if (index.size() < n) {
    throw Error(ErrorKind::kData, "requested " + std::to_string(n) + " frames but only " +
                                      std::to_string(index.size()) + " are available");
  }
  Rng rng(seed);
  FrameSample out;
  out.side = side;
  out.frames.reserve(n);
  out.origins.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(index.size() - i));
    std::swap(index[i], index[j]);
    out.origins.push_back(index[i].first);
    out.frames.push_back(clips[index[i].first].frames[index[i].second]);
  }
  return out;
}

DivergenceEstimate empirical_divergence(const FrameSample& u, const FrameSample& u_prime, std::uint64_t seed,
                                        const EnsembleOptions& options) {
  const std::size_t m = u.size();
  if (u_prime.size() != m) throw Error(ErrorKind::kShape, "both samples must have the same size");
  if (m % 2 != 0) throw Error(ErrorKind::kArity, "sample size must be even, got " + std::to_string(m));
  if (m == 0) throw Error(ErrorKind::kArity, "empty samples");
  if (options.members == 0) throw Error(ErrorKind::kArity, "ensemble needs at least one member");
  const std::size_t half = m / 2;

  const std::span<const MfccFrame> ua(u.frames), ub(u_prime.frames);
  const Standardizer standardize = fit_standardizer(ua.first(half), ub.first(half));

  std::vector<Example> train, test;
  train.reserve(m);
  test.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    (i < half ? train : test).push_back({standardize(ua[i]), -1.0});
    (i < half ? train : test).push_back({standardize(ub[i]), 1.0});
  }

  DivergenceEstimate est;
  est.best_error = 1.0;
  for (std::size_t k = 0; k < options.members; ++k) {
    const auto w = train_perceptron(train, options.epochs, mix_seed(seed, k));
    std::size_t wrong = 0;
    for (const auto& ex : test) {
      double score = w[kDims];
      for (std::size_t d = 0; d < kDims; ++d) score += w[d] * ex.x[d];
      wrong += ex.y * score <= 0.0;
    }
    const double err = static_cast<double>(wrong) / static_cast<double>(test.size());
    est.errors.push_back(err);
    est.best_error = std::min(est.best_error, err);
  }
  est.d_hat = std::clamp(2.0 * (1.0 - 2.0 * est.best_error), 0.0, 2.0);
  return est;
}

double divergence_bound_term(std::size_t m, std::size_t vc_dim, double delta) {
  if (m == 0 || vc_dim == 0) throw Error(ErrorKind::kArity, "m and vc_dim must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::kConfig, "delta must lie in (0, 1)");
  const double md = static_cast<double>(m);
  return 4.0 * std::sqrt((static_cast<double>(vc_dim) * std::log(2.0 * md) + std::log(2.0 / delta)) / md);
}

double divergence_bound(double d_hat, std::size_t m, std::size_t vc_dim, double delta) {
  return d_hat + divergence_bound_term(m, vc_dim, delta);
}

DivergenceReport make_report(std::string label, DivergenceEstimate estimate, std::size_t m, std::size_t vc_dim,
                             double delta) {
  DivergenceReport r;
  r.label = std::move(label);
  r.estimate = std::move(estimate);
  r.m = m;
  r.vc_dim = vc_dim;
  r.delta = delta;
  r.additive_term = divergence_bound_term(m, vc_dim, delta);
  r.bound = r.estimate.d_hat + r.additive_term;
  return r;
}

std::string DivergenceReport::serialize() const {
  const std::string prefix = label.empty() ? "" : label + ".";
  std::string out;
  char buf[160];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s%s=%.17g\n", prefix.c_str(), key, v);
    out += buf;
  };
  for (std::size_t k = 0; k < estimate.errors.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%serror.%zu=%.17g\n", prefix.c_str(), k, estimate.errors[k]);
    out += buf;
  }
  line("best_error", estimate.best_error);
  line("d_hat", estimate.d_hat);
  std::snprintf(buf, sizeof buf, "%sm=%zu\n%svc_dim=%zu\n", prefix.c_str(), m, prefix.c_str(), vc_dim);
  out += buf;
  line("delta", delta);
  line("additive_term", additive_term);
  line("bound", bound);
  return out;
}

}  // namespace tagvalid
