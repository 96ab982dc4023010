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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heraldswap/herald.hpp"
#include "heraldswap/metrics.hpp"
#include "heraldswap/numerics.hpp"
#include "heraldswap/optimize.hpp"

using namespace heraldswap;

namespace {

// Reference values computed offline with an independent Python model
// (numpy/scipy, dual rail and ideal single rail only).
constexpr double kHighLossGamma = 0.8584445057;
constexpr double kIdealCrossoverHalfDb = 5.4943709811;
struct DualRange {
  double p_d, max_range_db, eta_lim_db;
};
constexpr DualRange kDualRanges[] = {
    {1e-4, 52.181197465, 66.327211073}, {1e-3, 32.363774048, 46.357076184}, {1e-2, 14.005150657, 26.650211880}};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double rate_slope(Encoding e, const GammaPolicy& policy) {
  const auto etas = numerics::logspace(1e-6, 1e-4, 9);
  std::vector<double> rates;
  for (double eta : etas) rates.push_back(optimize_gamma(LinkParams::symmetric(e, eta), policy).metrics.rate);
  return loglog_slope(etas, rates);
}

}  // namespace

TEST(OptimizeGamma, IdealLinkIsBalanced) {
  const auto o = optimize_gamma(LinkParams::symmetric(Encoding::SingleRail, 1.0));
  EXPECT_NEAR(o.gamma, 0.5, 1e-6);
  EXPECT_NEAR(o.metrics.p_succ, 0.5, 1e-12);
  EXPECT_NEAR(o.metrics.hashing, 1.0, 1e-9);
}

TEST(OptimizeGamma, DualRailFixesHalf) {
  const auto o = optimize_gamma(LinkParams::symmetric(Encoding::DualRail, 0.1, 0.9));
  EXPECT_EQ(o.gamma, 0.5);
  EXPECT_NEAR(o.metrics.p_succ, 0.05, 1e-15);
}

TEST(OptimizeGamma, StationaryAtOptimum) {
  for (double eta : {0.5, 1e-2, 1e-5}) {
    auto p = LinkParams::symmetric(Encoding::SingleRail, eta);
    p.p_d = 1e-5;
    const auto o = optimize_gamma(p);
    const double h = 1e-5;
    const double up = evaluate(p.with_gamma(o.gamma + h)).rate;
    const double dn = evaluate(p.with_gamma(o.gamma - h)).rate;
    const double deriv = (up - dn) / (2 * h);
    EXPECT_LT(std::abs(deriv) * o.gamma / o.metrics.rate, 1e-6) << "eta " << eta;
    EXPECT_GE(o.metrics.rate, up);
    EXPECT_GE(o.metrics.rate, dn);
  }
}

TEST(OptimizeGamma, OptimumRisesMonotonicallyToPlateau) {
  double prev = 0.0;
  for (double db = 0.0; db <= 120.0; db += 5.0) {
    const double g = optimize_gamma(LinkParams::symmetric(Encoding::SingleRail, db_to_eta(db))).gamma;
    EXPECT_GE(g, prev - 1e-7) << db;
    prev = g;
  }
  EXPECT_NEAR(prev, kHighLossGamma, 1e-5);
}

TEST(HighLoss, TranscendentalRootMatchesReference) {
  EXPECT_NEAR(solve_high_loss_transcendental(), kHighLossGamma, 1e-8);
}

TEST(HighLoss, RootIsAMaximum) {
  const double g = solve_high_loss_transcendental();
  const double h = 1e-4;
  const double second = (high_loss_objective(g + h) - 2 * high_loss_objective(g) + high_loss_objective(g - h)) / (h * h);
  EXPECT_LT(second, 0.0);
  EXPECT_NEAR(high_loss_objective_derivative(g), 0.0, 1e-12);
}

TEST(HighLoss, AgreesWithNumericOptimization) {
  const double g = solve_high_loss_transcendental();
  const auto o = optimize_gamma(LinkParams::symmetric(Encoding::SingleRail, 1e-16));
  EXPECT_NEAR(o.gamma, g, 1e-6);
}

TEST(HighLoss, HashingOfConstructedStateApproachesLimit) {
  const double g = solve_high_loss_transcendental();
  const double limit = binary_entropy(g / 2) - binary_entropy(g);
  // The finite-loss correction scales with sqrt(eta).
  EXPECT_NEAR(evaluate(LinkParams::symmetric(Encoding::SingleRail, 1e-16, g)).hashing, limit, 1e-6);
  EXPECT_NEAR(evaluate(LinkParams::symmetric(Encoding::SingleRail, 1e-8, g)).hashing, limit, 1e-4);
}

TEST(HighLoss, OptimalFidelity) {
  for (double eta : {1e-6, 1e-8, 1e-10}) {
    const auto o = optimize_gamma(LinkParams::symmetric(Encoding::SingleRail, eta));
    EXPECT_NEAR(o.metrics.fidelity, 0.858, 1e-3);
  }
}

TEST(RateScaling, OptimizedSlopes) {
  EXPECT_NEAR(rate_slope(Encoding::SingleRail, GammaPolicy::maximize_rate()), 0.5, 0.02);
  EXPECT_NEAR(rate_slope(Encoding::DualRail, GammaPolicy::maximize_rate()), 1.0, 0.02);
}

TEST(TargetFidelity, MeetsTargetAtLowerRateWithSameSlope) {
  const auto p = LinkParams::symmetric(Encoding::SingleRail, 1e-3);
  const auto best = optimize_gamma(p);
  for (double t : {1 - 1e-2, 1 - 1e-3, 1 - 1e-4}) {
    const auto o = optimize_gamma(p, GammaPolicy::target(t));
    EXPECT_GE(o.metrics.fidelity, t - 1e-9);
    EXPECT_LT(o.metrics.rate, best.metrics.rate);
    EXPECT_NEAR(rate_slope(Encoding::SingleRail, GammaPolicy::target(t)), 0.5, 0.02);
  }
}

TEST(TargetFidelity, InfeasibleTarget) {
  auto p = LinkParams::symmetric(Encoding::SingleRail, 1e-6);
  p.p_d = 1e-2;
  EXPECT_THROW(optimize_gamma(p, GammaPolicy::target(0.99)), Infeasible);
}

TEST(TargetFidelity, PolicyValidation) {
  EXPECT_THROW(GammaPolicy::target(0.5), ParameterError);
  EXPECT_THROW(GammaPolicy::target(1.0), ParameterError);
}

TEST(Crossover, IdealLinkCrossesInsideBracket) {
  const auto c = crossover_loss(GammaPolicy::maximize_rate());
  EXPECT_GE(c.half_loss_db, 5.0);
  EXPECT_LE(c.half_loss_db, 9.0);
  EXPECT_NEAR(c.half_loss_db, kIdealCrossoverHalfDb, 1e-6);
  EXPECT_LE(c.bracket_hi_db - c.bracket_lo_db, 1e-9);
  auto rates = [](double half_db) {
    const double eta = db_to_eta(2 * half_db);
    return std::pair{evaluate(LinkParams::symmetric(Encoding::DualRail, eta)).rate,
                     optimize_gamma(LinkParams::symmetric(Encoding::SingleRail, eta)).metrics.rate};
  };
  for (double l : {1.0, 3.0, 5.0}) EXPECT_GT(rates(l).first, rates(l).second) << l;
  for (double l : {6.0, 10.0, 20.0}) EXPECT_LT(rates(l).first, rates(l).second) << l;
}

TEST(Crossover, FidelityTargetMovesCrossoverOut) {
  const double base = crossover_loss(GammaPolicy::maximize_rate()).half_loss_db;
  EXPECT_GT(crossover_loss(GammaPolicy::target(1 - 1e-3)).half_loss_db, base);
}

TEST(Crossover, NoCrossingWhenNeitherRateIsPositive) {
  LinkParams base;
  base.vis = 0.0;
  EXPECT_THROW(crossover_loss(GammaPolicy::maximize_rate(), base), NoRoot);
}

TEST(MaxRange, DualRailMatchesReferenceAndBeatsSingleRail) {
  for (const auto& ref : kDualRanges) {
    LinkParams d;
    d.encoding = Encoding::DualRail;
    d.p_d = ref.p_d;
    const auto rd = max_range(d);
    EXPECT_NEAR(rd.eta_max_db, ref.max_range_db, 1e-6);
    LinkParams s = d;
    s.encoding = Encoding::SingleRail;
    EXPECT_LT(max_range(s).eta_max_db, rd.eta_max_db);
  }
}

TEST(MaxRange, LowerNoiseReachesFurther) {
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    LinkParams p;
    p.encoding = e;
    p.p_d = 1e-4;
    const double lo = max_range(p).eta_max_db;
    p.p_d = 1e-2;
    EXPECT_GT(lo, max_range(p).eta_max_db);
  }
}

TEST(MaxRange, NoiselessLinkHasNoRoot) {
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    LinkParams p;
    p.encoding = e;
    EXPECT_THROW(max_range(p), NoRoot);
  }
}

TEST(MaxRange, BracketStraddlesZero) {
  LinkParams p;
  p.encoding = Encoding::DualRail;
  p.p_d = 1e-3;
  const auto r = max_range(p);
  EXPECT_TRUE(r.monotone);
  EXPECT_LE(r.bracket_hi_db - r.bracket_lo_db, 1e-9);
  EXPECT_GT(evaluate(p.with_total_eta(db_to_eta(r.bracket_lo_db))).hashing, 0.0);
  EXPECT_LE(evaluate(p.with_total_eta(db_to_eta(r.bracket_hi_db))).hashing, 0.0);
  EXPECT_NEAR(r.eta_max, db_to_eta(r.eta_max_db), 1e-15);
}

TEST(EtaLim, DualRailMatchesReference) {
  for (const auto& ref : kDualRanges) {
    LinkParams d;
    d.encoding = Encoding::DualRail;
    d.p_d = ref.p_d;
    const auto r = eta_lim(d);
    EXPECT_NEAR(r.eta_max_db, ref.eta_lim_db, 1e-6);
    EXPECT_NEAR(evaluate(d.with_total_eta(r.eta_max)).fidelity, 0.5, 1e-9);
    EXPECT_GT(evaluate(d.with_total_eta(db_to_eta(r.eta_max_db - 0.01))).fidelity, 0.5);
  }
}

TEST(EtaLim, StateAtLimitSitsOnSeparabilityBoundary) {
  LinkParams d;
  d.encoding = Encoding::DualRail;
  d.p_d = 1e-3;
  const auto r = eta_lim(d);
  const auto s = herald(d.with_total_eta(r.eta_max)).state;
  const auto w = bell_diagonal_projection(s);
  // Werner form with F = 1/2, not the maximally mixed state.
  EXPECT_NEAR(w.psi_plus, 0.5, 1e-9);
  EXPECT_NEAR(w.psi_minus, 1.0 / 6, 1e-9);
  EXPECT_NEAR(w.phi_plus, 1.0 / 6, 1e-9);
  EXPECT_NEAR(w.phi_minus, 1.0 / 6, 1e-9);
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix4>(partial_transpose(s, Party::A)).eigenvalues().minCoeff();
  EXPECT_NEAR(lmin, 0.0, 1e-9);
}

TEST(EtaLim, MonotoneInNoiseAndVisibility) {
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double pd : {1e-4, 1e-3, 1e-2, 1e-1}) {
      LinkParams p;
      p.encoding = e;
      p.p_d = pd;
      const double v = eta_lim(p).eta_max_db;
      EXPECT_LT(v, prev);
      prev = v;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double vis : {1.0, 0.98, 0.95, 0.9}) {
      LinkParams p;
      p.encoding = e;
      p.p_d = 1e-3;
      p.vis = vis;
      const double v = eta_lim(p).eta_max_db;
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(EtaLim, GammaChoiceChangesSingleRailLimit) {
  LinkParams p;
  p.p_d = 1e-3;
  RangeOptions best;
  best.gamma_choice = GammaChoice::MaximizeMetric;
  EXPECT_GT(eta_lim(p, best).eta_max_db, eta_lim(p).eta_max_db);
}

TEST(RangeOptionsValidation, RejectsBadScan) {
  RangeOptions o;
  o.scan_step_db = 0.0;
  LinkParams p;
  p.p_d = 1e-3;
  EXPECT_THROW(max_range(p, o), ParameterError);
}
