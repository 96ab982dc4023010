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
#include <random>

#include "heraldswap/herald.hpp"
#include "heraldswap/metrics.hpp"
#include "oracles.hpp"

using namespace heraldswap;

namespace {

LinkParams random_params(std::mt19937_64& rng, Encoding e) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinkParams p;
  p.encoding = e;
  p.eta_a = 0.02 + 0.98 * u(rng);
  p.eta_b = 0.02 + 0.98 * u(rng);
  p.eta_d = 0.5 + 0.5 * u(rng);
  p.p_d = std::pow(10.0, -6.0 + 5.0 * u(rng));
  p.vis = e == Encoding::SingleRail ? u(rng) : 1.0;
  p.eps = 0.5 * u(rng);
  p.gamma_a = 0.05 + 0.9 * u(rng);
  p.gamma_b = 0.05 + 0.9 * u(rng);
  p.parity = u(rng) < 0.5 ? 0 : 1;
  return p;
}

}  // namespace

TEST(HeraldIdeal, DualRailSucceedsWithHalfTransmissivityAndUnitFidelity) {
  for (double eta : {1.0, 0.5, 1e-2, 1e-5}) {
    const auto h = herald(LinkParams::symmetric(Encoding::DualRail, eta));
    EXPECT_NEAR(h.p_succ, eta / 2, 1e-15 * std::max(1.0, eta));
    EXPECT_NEAR(fidelity_bell(h.state, BellState::PsiPlus), 1.0, 1e-14);
  }
}

TEST(HeraldIdeal, SingleRailMatchesClosedForm) {
  for (double eta : {1.0, 0.7, 1e-2, 1e-6})
    for (double g : {0.1, 0.5, 0.858, 0.99}) {
      const auto h = herald(LinkParams::symmetric(Encoding::SingleRail, eta, g));
      const auto c = ideal_single_rail_closed_form(eta, g);
      const double se = std::sqrt(eta);
      EXPECT_NEAR(h.p_succ, 2 * se * (1 - g) * (1 - (1 - g) * se), 1e-15);
      EXPECT_LT(max_abs_diff(h.state.matrix(), c.state.matrix()), 1e-14);
      EXPECT_NEAR(h.p_succ, c.p_succ, 1e-15);
    }
}

TEST(HeraldIdeal, SingleRailPopulationsHaveUnitTrace) {
  const auto c = ideal_single_rail_closed_form(0.3, 0.6);
  EXPECT_NEAR(c.state.matrix().trace().real(), 1.0, 1e-15);
  // alpha1 + alpha2 = 1
  const double a1 = 2 * c.state(basis::k10, basis::k10).real();
  EXPECT_NEAR(a1 + c.state(basis::k00, basis::k00).real(), 1.0, 1e-15);
}

TEST(HeraldIdeal, ClosedFormRejectsDegenerateInputs) {
  EXPECT_THROW(ideal_single_rail_closed_form(0.0, 0.5), NoHerald);
  EXPECT_THROW(ideal_single_rail_closed_form(1.5, 0.5), ParameterError);
  EXPECT_THROW(ideal_single_rail_closed_form(0.5, 1.0), ParameterError);
}

TEST(HeraldParity, SingleRailParityFlipsCoherenceSign) {
  LinkParams p = LinkParams::symmetric(Encoding::SingleRail, 0.1, 0.7);
  const auto h0 = herald(p.with_parity(0));
  const auto h1 = herald(p.with_parity(1));
  EXPECT_GT(h0.state(basis::k10, basis::k01).real(), 0.0);
  EXPECT_NEAR(h1.state(basis::k10, basis::k01).real(), -h0.state(basis::k10, basis::k01).real(), 1e-15);
  EXPECT_NEAR(fidelity_bell(h1.state, BellState::PsiMinus), fidelity_bell(h0.state, BellState::PsiPlus), 1e-15);
  EXPECT_EQ(h0.p_succ, h1.p_succ);
}

TEST(HeraldVisibility, DualRailCoherenceScalesWithVisibilitySquared) {
  LinkParams p = LinkParams::symmetric(Encoding::DualRail, 0.2);
  p.vis = 0.9;
  const auto w = bell_diagonal_projection(herald(p).state);
  EXPECT_NEAR(w.psi_plus, (1 + 0.81) / 2, 1e-14);
  EXPECT_NEAR(w.psi_minus, (1 - 0.81) / 2, 1e-14);
}

TEST(HeraldVisibility, SuccessProbabilityIgnoresVisibility) {
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    LinkParams p = LinkParams::symmetric(e, 0.05, 0.6);
    p.p_d = 1e-3;
    const double ref = herald(p).p_succ;
    for (double v : {0.0, 0.3, 0.95}) {
      p.vis = v;
      EXPECT_NEAR(herald(p).p_succ, ref, 1e-16);
    }
  }
}

TEST(HeraldPhase, EnsembleAverageDampsSingleRailCoherence) {
  LinkParams p = LinkParams::symmetric(Encoding::SingleRail, 0.1, 0.6);
  const cplx c0 = herald(p).state(basis::k10, basis::k01);
  p.eps = 0.1;
  EXPECT_NEAR(std::abs(herald(p).state(basis::k10, basis::k01)), std::abs(c0) * std::exp(-0.1), 1e-15);
}

TEST(HeraldPhase, FixedPhaseRotatesCoherence) {
  LinkParams p = LinkParams::symmetric(Encoding::SingleRail, 0.1, 0.6);
  const cplx c0 = herald_single_rail_at_phase(p, 0.0).state(basis::k10, basis::k01);
  const cplx c1 = herald_single_rail_at_phase(p, 0.4).state(basis::k10, basis::k01);
  EXPECT_NEAR(std::abs(c1 - c0 * std::polar(1.0, 0.4)), 0.0, 1e-15);
}

TEST(HeraldPhase, DualRailIgnoresPhaseNoise) {
  LinkParams p = LinkParams::symmetric(Encoding::DualRail, 0.1);
  p.p_d = 1e-3;
  const auto a = herald(p);
  p.eps = 0.5;
  EXPECT_LT(max_abs_diff(herald(p).state.matrix(), a.state.matrix()), 1e-16);
}

TEST(HeraldErrors, RejectsOutOfRangeParameters) {
  LinkParams p;
  p.eta_a = 1.5;
  EXPECT_THROW(herald(p), ParameterError);
  p = {};
  p.p_d = 1.0;
  EXPECT_THROW(herald(p), ParameterError);
  p = {};
  p.parity = 2;
  EXPECT_THROW(herald(p), ParameterError);
}

TEST(HeraldErrors, ZeroTransmissionWithoutNoiseNeverHeralds) {
  EXPECT_THROW(herald(LinkParams::symmetric(Encoding::SingleRail, 0.0)), NoHerald);
  EXPECT_THROW(herald(LinkParams::symmetric(Encoding::DualRail, 0.0)), NoHerald);
}

TEST(HeraldErrors, EncodingMismatch) {
  LinkParams p;
  p.encoding = Encoding::DualRail;
  EXPECT_THROW(herald_single_rail(p), ParameterError);
  p.encoding = Encoding::SingleRail;
  EXPECT_THROW(herald_dual_rail(p), ParameterError);
}

TEST(HeraldDarkCounts, ZeroTransmissionStillHeraldsDarkCountStates) {
  LinkParams p = LinkParams::symmetric(Encoding::SingleRail, 0.0, 0.5);
  p.p_d = 1e-2;
  const auto h = herald(p);
  EXPECT_GT(h.p_succ, 0.0);
  EXPECT_LT(fidelity_bell(h.state, BellState::PsiPlus), 0.5);
}

// Independent route: dense density-matrix simulation with Kraus loss and a
// matrix-exponential beamsplitter.
TEST(HeraldOracle, AgreesWithDenseKrausSimulation) {
  std::mt19937_64 rng(20261016);
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    for (int i = 0; i < 15; ++i) {
      const LinkParams p = random_params(rng, e);
      const auto a = herald(p);
      const auto o = oracle::kraus_herald(p);
      EXPECT_LT(max_abs_diff(a.state.matrix(), o.state), 1e-12) << to_string(e) << " point " << i;
      EXPECT_NEAR(a.p_succ, o.p_succ, 1e-12) << to_string(e) << " point " << i;
    }
  }
}

TEST(HeraldProperties, StatesAreValidAcrossRandomGrid) {
  std::mt19937_64 rng(5);
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail})
    for (int i = 0; i < 300; ++i) {
      LinkParams p = random_params(rng, e);
      p.vis = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto h = herald(p);
      EXPECT_TRUE(is_density(h.state.matrix()));
      EXPECT_GT(h.p_succ, 0.0);
      EXPECT_LE(h.p_succ, 1.0);
    }
}
