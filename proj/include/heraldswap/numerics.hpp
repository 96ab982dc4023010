/**
 * Copyright 2026 The heraldswap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "heraldswap/errors.hpp"

namespace heraldswap::numerics {

struct Maximum {
  double x;
  double value;
};

/// Maximizes f on [lo, hi]: a uniform scan locates the best cell, then Brent's
/// method (golden section with parabolic steps) refines inside the neighbouring
/// cells. `bits` bounds the x-precision Brent aims for.
template <class F>
Maximum maximize(F&& f, double lo, double hi, int scan_points = 65,
                 int bits = std::numeric_limits<double>::digits / 2) {
  if (!(hi > lo) || scan_points < 3) throw ParameterError("maximize: bad interval");
  const double step = (hi - lo) / (scan_points - 1);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double v = f(lo + i * step);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + std::max(best - 1, 0) * step;
  const double b = lo + std::min(best + 1, scan_points - 1) * step;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, b, bits, iters);
  if (-r.second >= best_value) return {r.first, -r.second};
  return {lo + best * step, best_value};
}

struct Root {
  double x;
  double lo;
  double hi;
};

/// Bisection until the bracket is narrower than `x_tolerance`. f(lo) and f(hi)
/// must differ in sign; otherwise NoRoot.
template <class F>
Root bisect(F&& f, double lo, double hi, double x_tolerance) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, lo, lo};
  if (fhi == 0.0) return {hi, hi, hi};
  if ((flo > 0.0) == (fhi > 0.0)) throw NoRoot("bisect: endpoints do not straddle a root");
  std::uintmax_t iters = 400;
  const auto br = boost::math::tools::bisect(
      f, lo, hi, [x_tolerance](double a, double b) { return std::abs(b - a) <= x_tolerance; }, iters);
  return {0.5 * (br.first + br.second), br.first, br.second};
}

/// Index i of the first grid cell [x_i, x_{i+1}] where f turns from
/// positive to non-positive, or -1.
inline int first_downcrossing(const std::vector<double>& values) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i] > 0.0 && values[i + 1] <= 0.0) return static_cast<int>(i);
  }
  return -1;
}

inline std::vector<double> linspace(double start, double stop, int points) {
  std::vector<double> xs(static_cast<std::size_t>(points));
  if (points == 1) {
    xs[0] = start;
    return xs;
  }
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
  return xs;
}

inline std::vector<double> logspace(double start, double stop, int points) {
  auto xs = linspace(std::log10(start), std::log10(stop), points);
  for (double& x : xs) x = std::pow(10.0, x);
  return xs;
}

/// Gauss-Hermite rule for the weight exp(-x^2), via the Golub-Welsch eigenproblem.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw ParameterError("quadrature order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  const double mu0 = std::sqrt(M_PI);
  for (int i = 0; i < order; ++i) {
    rule.nodes.push_back(solver.eigenvalues()[i]);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

/// E[f(theta)] for theta ~ N(0, variance) using an order-n Gauss-Hermite rule.
template <class F>
auto gaussian_expectation(F&& f, double variance, const QuadratureRule& rule) {
  using R = decltype(f(0.0));
  if (variance == 0.0) return R(f(0.0));
  const double scale = std::sqrt(2.0 * variance);
  R acc = f(scale * rule.nodes[0]) * (rule.weights[0] / std::sqrt(M_PI));
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) acc += f(scale * rule.nodes[i]) * (rule.weights[i] / std::sqrt(M_PI));
  return acc;
}

}  // namespace heraldswap::numerics
