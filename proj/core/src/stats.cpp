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

#include "tagvalid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tagvalid {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kGridPoints = 1001;
constexpr int kGoldenIterations = 100;

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log P[X >= k] given log C(n, k). Terms are summed relative to the first
// one and rescaled before they can overflow.
double log_upper_tail(std::size_t n, std::size_t k, double p, double log_choose_nk) {
  if (k == 0) return 0.0;
  if (k > n) return kNegInf;
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return 0.0;
  const double lq = std::log1p(-p);
  const double odds = p / (1.0 - p);
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (std::size_t j = k; j < n; ++j) {
    const double ratio = static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    term *= ratio;
    sum += term;
    if (ratio < 0.5 && term < 1e-17 * sum) break;
    if (sum > 1e250) {
      log_scale += std::log(sum);
      term /= sum;
      sum = 1.0;
    }
  }
  const double first = log_choose_nk + static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * lq;
  return std::min(0.0, first + log_scale + std::log(sum));
}

}  // namespace

double log_binomial_upper_tail(std::size_t n, std::size_t k, double p) {
  return log_upper_tail(n, k, p, k <= n ? log_choose(n, k) : 0.0);
}

double random_consistency_at(const OutcomePair& o, double p_t) {
  const double l = log_binomial_upper_tail(o.n_t, o.x, p_t) + log_binomial_upper_tail(o.n_f, o.y, 1.0 - p_t);
  return l == kNegInf ? 0.0 : std::exp(l);
}

ConsistencyResult random_consistency_pvalue(const OutcomePair& o) {
  const double cx = o.x <= o.n_t ? log_choose(o.n_t, o.x) : 0.0;
  const double cy = o.y <= o.n_f ? log_choose(o.n_f, o.y) : 0.0;
  auto f = [&](double p) {
    const double l = log_upper_tail(o.n_t, o.x, p, cx) + log_upper_tail(o.n_f, o.y, 1.0 - p, cy);
    return l == kNegInf ? 0.0 : std::exp(l);
  };
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double v = f(static_cast<double>(i) / (kGridPoints - 1));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  ConsistencyResult result{best_value, static_cast<double>(best) / (kGridPoints - 1)};

  const double step = 1.0 / (kGridPoints - 1);
  double lo = std::max(0.0, result.argmax_p_t - step);
  double hi = std::min(1.0, result.argmax_p_t + step);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < kGoldenIterations && hi - lo > 1e-15; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  for (double p : {c, d}) {
    const double v = f(p);
    if (v > result.p_value) result = {v, p};
  }
  result.p_value = std::min(1.0, result.p_value);
  return result;
}

double sign_test_upper_tail(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 1.0;
  if (a > b) return 0.0;
  return std::min(1.0, std::exp(log_binomial_upper_tail(b, a, 0.5)));
}

double paired_contradiction_pvalue(const PairedOutcome& po, PairDirection direction) {
  const std::size_t a = direction == PairDirection::kFirstBetter ? po.a12 : po.a21;
  return sign_test_upper_tail(a, po.b());
}

std::vector<ConsistencyRegion> illustrative_regions(std::size_t n_t, std::size_t n_f, double alpha) {
  std::vector<ConsistencyRegion> out;
  for (int step = 1; step <= 9; ++step) {
    ConsistencyRegion r;
    r.p_t = step / 10.0;
    r.max_y.assign(n_t + 1, -1);
    for (std::size_t x = 0; x <= n_t; ++x) {
      const double lx = log_binomial_upper_tail(n_t, x, r.p_t);
      for (std::size_t y = 0; y <= n_f; ++y) {
        if (lx + log_binomial_upper_tail(n_f, y, 1.0 - r.p_t) >= std::log(alpha)) {
          r.max_y[x] = static_cast<long>(y);
        } else {
          break;
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tagvalid
