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

// Independent reference implementations used as test oracles. They share no
// code with the library and favour directness over speed.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tagvalid::oracle {

// Row n of Pascal's triangle in exact 64-bit integers (n <= 62).
inline std::vector<std::uint64_t> pascal_row(std::size_t n) {
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return row;
}

// P[A >= a], A ~ Bin(b, 1/2), from exact integer counts.
inline long double sign_tail(std::size_t a, std::size_t b) {
  if (a == 0) return 1.0L;
  if (a > b) return 0.0L;
  const auto row = pascal_row(b);
  std::uint64_t hits = 0;
  for (std::size_t k = a; k <= b; ++k) hits += row[k];
  return std::ldexp(static_cast<long double>(hits), -static_cast<int>(b));
}

// All upper tails P[X >= k], k = 0..n, of Bin(n, p) by direct factorial sums.
inline std::vector<long double> upper_tails(std::size_t n, long double p) {
  const auto row = pascal_row(n);
  std::vector<long double> pmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    pmf[k] = static_cast<long double>(row[k]) * std::pow(p, static_cast<long double>(k)) *
             std::pow(1.0L - p, static_cast<long double>(n - k));
  }
  std::vector<long double> tail(n + 2, 0.0L);
  for (std::size_t k = n + 1; k-- > 0;) tail[k] = tail[k + 1] + pmf[k];
  tail.pop_back();
  return tail;
}

inline long double joint_tail(std::size_t x, std::size_t y, std::size_t n_t, std::size_t n_f, long double p) {
  return upper_tails(n_t, p)[x] * upper_tails(n_f, 1.0L - p)[y];
}

// Maximum over p of P[X >= x] P[Y >= y] for every (x, y) at fixed sizes: a
// dense shared grid locates the maximum and ternary search on the joint
// tail refines it inside the neighbouring grid cells.
struct SweepTable {
  std::size_t n_t = 0, n_f = 0;
  std::vector<long double> value;  // (n_t + 1) x (n_f + 1)
  std::vector<long double> argmax;
  long double at(std::size_t x, std::size_t y) const { return value[x * (n_f + 1) + y]; }
  long double arg(std::size_t x, std::size_t y) const { return argmax[x * (n_f + 1) + y]; }
};

inline SweepTable random_consistency_sweep(std::size_t n_t, std::size_t n_f, std::size_t grid = 2000) {
  std::vector<std::vector<long double>> tx(grid + 1), ty(grid + 1);
  for (std::size_t g = 0; g <= grid; ++g) {
    const long double p = static_cast<long double>(g) / grid;
    tx[g] = upper_tails(n_t, p);
    ty[g] = upper_tails(n_f, 1.0L - p);
  }
  SweepTable t{n_t, n_f, std::vector<long double>((n_t + 1) * (n_f + 1)),
               std::vector<long double>((n_t + 1) * (n_f + 1))};
  for (std::size_t x = 0; x <= n_t; ++x) {
    for (std::size_t y = 0; y <= n_f; ++y) {
      std::size_t best = 0;
      for (std::size_t g = 1; g <= grid; ++g) {
        if (tx[g][x] * ty[g][y] > tx[best][x] * ty[best][y]) best = g;
      }
      long double lo = static_cast<long double>(best == 0 ? 0 : best - 1) / grid;
      long double hi = static_cast<long double>(std::min(best + 1, grid)) / grid;
      for (int it = 0; it < 90; ++it) {
        const long double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
        if (joint_tail(x, y, n_t, n_f, a) < joint_tail(x, y, n_t, n_f, b)) {
          lo = a;
        } else {
          hi = b;
        }
      }
      long double arg = (lo + hi) / 2;
      long double v = joint_tail(x, y, n_t, n_f, arg);
      const long double at_grid = tx[best][x] * ty[best][y];
      if (at_grid > v) {
        v = at_grid;
        arg = static_cast<long double>(best) / grid;
      }
      t.value[x * (n_f + 1) + y] = v;
      t.argmax[x * (n_f + 1) + y] = arg;
    }
  }
  return t;
}

// Fixed-size variant for exhaustive sweeps: binomial coefficients are built
// once and the maximum over p is located by golden-section search, which is
// exact up to rounding because each tail is log-concave in p.
class ConsistencyOracle {
 public:
  ConsistencyOracle(std::size_t n_t, std::size_t n_f) : n_t_(n_t), n_f_(n_f), row_t_(pascal_row(n_t)), row_f_(pascal_row(n_f)) {}

  long double operator()(std::size_t x, std::size_t y) const {
    long double lo = 0.0L, hi = 1.0L;
    const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    long double fa = joint(x, y, a), fb = joint(x, y, b);
    for (int it = 0; it < 90; ++it) {
      if (fa < fb) {
        lo = a;
        a = b;
        fa = fb;
        b = lo + r * (hi - lo);
        fb = joint(x, y, b);
      } else {
        hi = b;
        b = a;
        fb = fa;
        a = hi - r * (hi - lo);
        fa = joint(x, y, a);
      }
    }
    return std::max({fa, fb, joint(x, y, 0.0L), joint(x, y, 1.0L)});
  }

 private:
  static long double tail(const std::vector<std::uint64_t>& row, std::size_t n, std::size_t k, long double p) {
    std::array<long double, 64> pw, qw;
    pw[0] = qw[0] = 1.0L;
    for (std::size_t j = 1; j <= n; ++j) {
      pw[j] = pw[j - 1] * p;
      qw[j] = qw[j - 1] * (1.0L - p);
    }
    long double sum = 0.0L;
    for (std::size_t j = k; j <= n; ++j) sum += static_cast<long double>(row[j]) * pw[j] * qw[n - j];
    return sum;
  }
  long double joint(std::size_t x, std::size_t y, long double p) const {
    return tail(row_t_, n_t_, x, p) * tail(row_f_, n_f_, y, 1.0L - p);
  }

  std::size_t n_t_, n_f_;
  std::vector<std::uint64_t> row_t_, row_f_;
};

// Thresholded two-tag decision: normalise by the largest
// magnitude, keep entries strictly above lambda, and read the label.
inline std::pair<std::array<int, 2>, int> threshold_reference(std::array<double, 2> w, double lambda) {
  const double m = std::max(std::abs(w[0]), std::abs(w[1]));
  std::array<int, 2> tags{0, 0};
  if (m == 0.0) return {tags, 0};
  for (int i = 0; i < 2; ++i) tags[i] = w[i] / m > lambda ? 1 : 0;
  int label;
  if (tags[0] + tags[1] == 1) {
    label = tags[0] ? 0 : 1;
  } else {
    label = w[1] > w[0] ? 1 : 0;
  }
  return {tags, label};
}

// Minimum-l1 solution of ||f - D s||^2 <= eps_sq. Plain ISTA on the penalised
// form for a fixed iteration count, with the penalty bisected (geometrically)
// until the residual sits on the constraint boundary.
struct BpdnReference {
  Eigen::VectorXd s;
  double residual_sq = 0.0;
  double l1 = 0.0;
};

inline Eigen::VectorXd ista(const Eigen::MatrixXd& d, const Eigen::VectorXd& f, double mu, int iterations) {
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(d).singularValues()(0);
  const double step = 1.0 / (sigma * sigma);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d.cols());
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd z = s + step * d.transpose() * (f - d * s);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double a = std::abs(z(i)) - step * mu;
      s(i) = a > 0.0 ? std::copysign(a, z(i)) : 0.0;
    }
  }
  return s;
}

inline BpdnReference bpdn_reference(const Eigen::MatrixXd& d, const Eigen::VectorXd& f, double eps_sq,
                                    int iterations = 10000, int bisections = 40) {
  BpdnReference best;
  best.s = Eigen::VectorXd::Zero(d.cols());
  best.residual_sq = f.squaredNorm();
  if (best.residual_sq <= eps_sq) return best;
  double lo = 1e-8, hi = (d.transpose() * f).cwiseAbs().maxCoeff();
  best.l1 = std::numeric_limits<double>::infinity();
  for (int b = 0; b < bisections; ++b) {
    const double mu = std::sqrt(lo * hi);
    const Eigen::VectorXd s = ista(d, f, mu, iterations);
    const double r = (f - d * s).squaredNorm();
    if (r <= eps_sq) {
      lo = mu;
      if (s.lpNorm<1>() < best.l1) best = {s, r, s.lpNorm<1>()};
    } else {
      hi = mu;
    }
  }
  return best;
}

}  // namespace tagvalid::oracle
