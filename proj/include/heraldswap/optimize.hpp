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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "heraldswap/errors.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/metrics.hpp"
#include "heraldswap/numerics.hpp"

namespace heraldswap {

inline constexpr double kGammaMin = 1e-6;
inline constexpr double kGammaMax = 1.0 - 1e-6;

struct GammaPolicy {
  enum class Mode { MaximizeRate, TargetFidelity };
  Mode mode = Mode::MaximizeRate;
  double target_fidelity = 0.0;
  double tolerance = 1e-9;

  static GammaPolicy maximize_rate() { return {}; }

  static GammaPolicy target(double fidelity) {
    GammaPolicy p;
    p.mode = Mode::TargetFidelity;
    p.target_fidelity = fidelity;
    p.validate();
    return p;
  }

  void validate() const {
    if (mode == Mode::TargetFidelity && !(target_fidelity > 0.5 && target_fidelity < 1.0))
      throw ParameterError("target fidelity must lie in (0.5, 1)");
    if (!(tolerance > 0.0)) throw ParameterError("gamma tolerance must be > 0");
  }
};

struct GammaOptimum {
  double gamma;
  LinkMetrics metrics;
};

namespace detail {

inline int brent_bits(double tolerance) {
  const int wanted = static_cast<int>(std::ceil(-std::log2(tolerance)));
  return std::clamp(wanted, 8, std::numeric_limits<double>::digits / 2);
}

/// Metrics at gamma, or nullopt-like sentinel when the link never heralds.
inline bool try_evaluate(const LinkParams& params, double gamma, LinkMetrics& out) {
  try {
    out = evaluate(params.with_gamma(gamma));
    return true;
  } catch (const NoHerald&) {
    return false;
  }
}

template <class Field>
double metric_or(const LinkParams& params, double gamma, Field field, double fallback) {
  LinkMetrics m;
  return try_evaluate(params, gamma, m) ? field(m) : fallback;
}

}  // namespace detail

/// Symmetric emitter weight gamma_a = gamma_b chosen by `policy`.
/// Dual rail has no free weight and returns gamma = 1/2.
///
/// MaximizeRate falls back to maximizing the raw hashing bound where the rate
/// vanishes for every gamma, so the returned gamma stays meaningful past the
/// maximum range.
inline GammaOptimum optimize_gamma(const LinkParams& params, const GammaPolicy& policy = {}) {
  params.validate();
  policy.validate();
  if (params.encoding == Encoding::DualRail) return {0.5, evaluate(params.with_gamma(0.5))};

  const double ninf = -std::numeric_limits<double>::infinity();
  const int bits = detail::brent_bits(policy.tolerance);
  auto by_rate = [&](double g) { return detail::metric_or(params, g, [](const LinkMetrics& m) { return m.rate; }, ninf); };
  auto best = numerics::maximize(by_rate, kGammaMin, kGammaMax, 65, bits);
  if (!(best.value > 0.0)) {
    auto by_hashing = [&](double g) {
      return detail::metric_or(params, g, [](const LinkMetrics& m) { return m.hashing; }, ninf);
    };
    best = numerics::maximize(by_hashing, kGammaMin, kGammaMax, 65, bits);
  }
  if (!std::isfinite(best.value)) throw NoHerald("no gamma heralds at these parameters");
  double gamma = best.x;

  if (policy.mode == GammaPolicy::Mode::TargetFidelity) {
    const double target = policy.target_fidelity;
    auto excess = [&](double g) {
      return detail::metric_or(params, g, [](const LinkMetrics& m) { return m.fidelity; }, 0.0) - target;
    };
    if (excess(gamma) < 0.0) {
      // Fidelity rises with gamma above the rate optimum; take the nearest feasible gamma.
      double hi = kGammaMax;
      if (excess(hi) < 0.0) {
        const auto peak = numerics::maximize(excess, gamma, kGammaMax, 65, bits);
        if (peak.value < 0.0) throw Infeasible("target fidelity unreachable at these parameters");
        hi = peak.x;
      }
      const auto root = numerics::bisect(excess, gamma, hi, policy.tolerance);
      gamma = root.hi;
    }
  }
  return {gamma, evaluate(params.with_gamma(gamma))};
}

/// (1 - gamma) (h2(gamma/2) - h2(gamma)): the gamma dependence of the ideal
/// single-rail rate at vanishing transmissivity, up to the factor 2 sqrt(eta).
inline double high_loss_objective(double gamma) {
  return (1.0 - gamma) * (binary_entropy(gamma / 2.0) - binary_entropy(gamma));
}

/// d/dgamma of high_loss_objective, using h2'(x) = log2((1 - x) / x).
inline double high_loss_objective_derivative(double gamma) {
  auto dh2 = [](double x) { return std::log2((1.0 - x) / x); };
  return -(binary_entropy(gamma / 2.0) - binary_entropy(gamma)) + (1.0 - gamma) * (0.5 * dh2(gamma / 2.0) - dh2(gamma));
}

/// Stationary point of high_loss_objective in (0, 1).
inline double solve_high_loss_transcendental() {
  const auto xs = numerics::linspace(0.01, 0.99, 99);
  std::vector<double> ds;
  ds.reserve(xs.size());
  for (double x : xs) ds.push_back(high_loss_objective_derivative(x));
  const int cell = numerics::first_downcrossing(ds);
  if (cell < 0) throw NoRoot("high-loss derivative has no sign change");
  return numerics::bisect(high_loss_objective_derivative, xs[static_cast<std::size_t>(cell)],
                          xs[static_cast<std::size_t>(cell) + 1], 1e-15)
      .x;
}

// ---------------------------------------------------------------------------
// Range analysis. Loss axes are in dB of total transmissivity unless named
// half-channel.

enum class RangeMetric { HashingZero, FidelityHalf };

inline const char* to_string(RangeMetric m) { return m == RangeMetric::HashingZero ? "hashing_zero" : "fidelity_half"; }

struct RangeResult {
  RangeMetric metric = RangeMetric::HashingZero;
  double eta_max = 0.0;     // total transmissivity at the crossing
  double eta_max_db = 0.0;  // same, as loss in dB
  double bracket_lo_db = 0.0;  // metric above threshold here
  double bracket_hi_db = 0.0;  // metric at or below threshold here
  bool monotone = true;        // no re-entry above threshold beyond the crossing on the scan grid
};

/// Single-rail emitter weight used along a loss scan. Dual rail always uses 1/2.
///
/// Auto: MaximizeMetric for max_range, HighLossRateOptimal for eta_lim and
/// distilled ranges, where the rate optimum is undefined past the raw range.
enum class GammaChoice { Auto, Given, MaximizeMetric, HighLossRateOptimal };

struct RangeOptions {
  double scan_lo_db = 0.0;
  double scan_hi_db = 300.0;
  double scan_step_db = 1.0;
  double tolerance_db = 1e-9;
  GammaChoice gamma_choice = GammaChoice::Auto;
};

/// First loss at which g(loss_db) drops from positive to non-positive:
/// grid scan, then bisection to opts.tolerance_db.
inline RangeResult find_range(const std::function<double(double)>& g, RangeMetric metric, const RangeOptions& opts) {
  if (!(opts.scan_hi_db > opts.scan_lo_db) || !(opts.scan_step_db > 0.0) || !(opts.tolerance_db > 0.0))
    throw ParameterError("bad range scan options");
  const int points = static_cast<int>(std::ceil((opts.scan_hi_db - opts.scan_lo_db) / opts.scan_step_db)) + 1;
  const auto grid = numerics::linspace(opts.scan_lo_db, opts.scan_hi_db, points);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double db : grid) values.push_back(g(db));
  const int cell = numerics::first_downcrossing(values);
  if (cell < 0) throw NoRoot(std::string("no ") + to_string(metric) + " crossing in the scanned loss range");

  RangeResult r;
  r.metric = metric;
  for (std::size_t i = static_cast<std::size_t>(cell) + 1; i < values.size(); ++i) r.monotone = r.monotone && values[i] <= 0.0;
  const auto root = numerics::bisect(g, grid[static_cast<std::size_t>(cell)], grid[static_cast<std::size_t>(cell) + 1],
                                     opts.tolerance_db);
  r.bracket_lo_db = root.lo;
  r.bracket_hi_db = root.hi;
  r.eta_max_db = root.x;
  r.eta_max = db_to_eta(root.x);
  return r;
}

namespace detail {

inline GammaChoice resolve(GammaChoice c, GammaChoice fallback) { return c == GammaChoice::Auto ? fallback : c; }

/// Params with gamma fixed per `choice`; MaximizeMetric leaves them unchanged.
inline LinkParams apply_gamma_choice(const LinkParams& params, GammaChoice choice) {
  if (params.encoding == Encoding::DualRail) return params.with_gamma(0.5);
  if (choice == GammaChoice::HighLossRateOptimal) {
    static const double g = solve_high_loss_transcendental();
    return params.with_gamma(g);
  }
  return params;
}

/// Largest value of `field` over gamma, or its value at the params' gamma.
template <class Field>
double best_over_gamma(const LinkParams& params, Field field, bool maximize) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (!maximize || params.encoding == Encoding::DualRail) {
    LinkMetrics m;
    try {
      m = evaluate(params);
    } catch (const NoHerald&) {
      return ninf;
    }
    return field(m);
  }
  return numerics::maximize([&](double g) { return metric_or(params, g, field, ninf); }, kGammaMin, kGammaMax).value;
}

}  // namespace detail

/// Loss at which the raw hashing bound reaches zero.
inline RangeResult max_range(const LinkParams& params, const RangeOptions& opts = {}) {
  params.validate();
  const GammaChoice choice = detail::resolve(opts.gamma_choice, GammaChoice::MaximizeMetric);
  const LinkParams base = detail::apply_gamma_choice(params, choice);
  auto g = [&](double db) {
    return detail::best_over_gamma(base.with_total_eta(db_to_eta(db)), [](const LinkMetrics& m) { return m.hashing; },
                                   choice == GammaChoice::MaximizeMetric);
  };
  return find_range(g, RangeMetric::HashingZero, opts);
}

/// Loss at which the fidelity to the heralded Bell state reaches 1/2.
inline RangeResult eta_lim(const LinkParams& params, const RangeOptions& opts = {}) {
  params.validate();
  const GammaChoice choice = detail::resolve(opts.gamma_choice, GammaChoice::HighLossRateOptimal);
  const LinkParams base = detail::apply_gamma_choice(params, choice);
  auto g = [&](double db) {
    return detail::best_over_gamma(base.with_total_eta(db_to_eta(db)),
                                   [](const LinkMetrics& m) { return m.fidelity; },
                                   choice == GammaChoice::MaximizeMetric) -
           0.5;
  };
  return find_range(g, RangeMetric::FidelityHalf, opts);
}

struct CrossoverResult {
  double half_loss_db;
  double bracket_lo_db;  // dual rail ahead here
  double bracket_hi_db;  // single rail level or ahead here
};

/// Half-channel loss where the dual-rail rate stops exceeding the single-rail
/// rate. `base` supplies the non-idealities; encoding and gamma are overridden.
inline CrossoverResult crossover_loss(const GammaPolicy& policy, const LinkParams& base = {},
                                      double scan_hi_db = 40.0, double scan_step_db = 0.05, double tolerance_db = 1e-9) {
  base.validate();
  policy.validate();
  auto diff = [&](double half_db) {
    const double eta = db_to_eta(2.0 * half_db);
    LinkParams dual = base.with_total_eta(eta);
    dual.encoding = Encoding::DualRail;
    LinkParams single = base.with_total_eta(eta);
    single.encoding = Encoding::SingleRail;
    return evaluate(dual.with_gamma(0.5)).rate - optimize_gamma(single, policy).metrics.rate;
  };
  const int points = static_cast<int>(std::ceil(scan_hi_db / scan_step_db));
  const auto grid = numerics::linspace(scan_step_db, scan_hi_db, points);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double x : grid) values.push_back(diff(x));
  const int cell = numerics::first_downcrossing(values);
  if (cell < 0) throw NoRoot("dual-rail and single-rail rates do not cross in the scanned range");
  const auto root =
      numerics::bisect(diff, grid[static_cast<std::size_t>(cell)], grid[static_cast<std::size_t>(cell) + 1], tolerance_db);
  return {root.x, root.lo, root.hi};
}

}  // namespace heraldswap
