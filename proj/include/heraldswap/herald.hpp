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

#include <cmath>
#include <complex>

#include "heraldswap/errors.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/states.hpp"

namespace heraldswap {

/// Conditional memory state together with the total probability of all
/// click patterns that herald it.
struct HeraldOutcome {
  TwoQubitState state;
  double p_succ;
};

/// Ensemble-averaged visibility |V| exp(-eps) for per-side carrier phases
/// drawn from N(0, eps). Only the single-rail coherence depends on it.
inline double ensemble_average_visibility(double vis, double eps) {
  if (!(vis >= 0.0 && vis <= 1.0)) throw ParameterError("vis outside [0,1]");
  if (!(eps >= 0.0)) throw ParameterError("eps must be >= 0");
  return vis * std::exp(-eps);
}

/// Unnormalized coefficients of the single-rail heralded state for one click
/// pattern. Superscript-0 terms are the photon-click contributions, weighted
/// by (1-p_d)^2; superscript-1 terms are vacuum-plus-dark-count
/// contributions, weighted by p_d (1-p_d).
struct SingleRailCoefficients {
  double c1_0, c2_0, c4_0;
  cplx c3_0;
  double c1_1, c2_1, c4_1, c5_1;
  /// Total weight of one pattern.
  double norm(double p_d) const {
    return (1 - p_d) * (1 - p_d) * (c1_0 + c2_0 + c4_0) + p_d * (1 - p_d) * (c1_1 + c2_1 + c4_1 + c5_1);
  }
};

/// `coherence` is the complex visibility multiplying the |1,0><0,1| element.
inline SingleRailCoefficients single_rail_coefficients(const LinkParams& p, cplx coherence) {
  const double ga = p.gamma_a, gb = p.gamma_b;
  const double ea = p.eta_a, eb = p.eta_b, ed = p.eta_d;
  const double sign = p.parity == 0 ? 1.0 : -1.0;
  SingleRailCoefficients c{};
  c.c1_0 = 0.5 * ga * (1 - gb) * eb * ed;
  c.c2_0 = 0.5 * (1 - ga) * gb * ea * ed;
  c.c3_0 = 0.5 * sign * ed * std::sqrt(ga * (1 - ga)) * std::sqrt(gb * (1 - gb)) * std::sqrt(ea * eb) * coherence;
  c.c4_0 = 0.5 * ed * (1 - ga) * (1 - gb) * (ea + eb - 2 * ea * eb * ed);
  c.c1_1 = ga * (1 - gb) * (1 - eb * ed);
  c.c2_1 = (1 - ga) * gb * (1 - ea * ed);
  c.c4_1 = (1 - ga) * (1 - gb) * (1 - ea * ed) * (1 - eb * ed);
  c.c5_1 = ga * gb;
  return c;
}

namespace detail {

inline Matrix4 single_rail_matrix(const SingleRailCoefficients& c, double p_d) {
  const double w0 = (1 - p_d) * (1 - p_d);
  const double w1 = p_d * (1 - p_d);
  Matrix4 m = Matrix4::Zero();
  m(basis::k11, basis::k11) = w1 * c.c5_1;
  m(basis::k10, basis::k10) = w0 * c.c1_0 + w1 * c.c1_1;
  m(basis::k01, basis::k01) = w0 * c.c2_0 + w1 * c.c2_1;
  m(basis::k00, basis::k00) = w0 * c.c4_0 + w1 * c.c4_1;
  m(basis::k10, basis::k01) = w0 * c.c3_0;
  m(basis::k01, basis::k10) = w0 * std::conj(c.c3_0);
  return m;
}

inline HeraldOutcome single_rail_outcome(const LinkParams& params, cplx coherence) {
  if (params.encoding != Encoding::SingleRail) throw ParameterError("single-rail herald called with dual-rail params");
  params.validate();
  const auto c = single_rail_coefficients(params, coherence);
  const double n = c.norm(params.p_d);
  if (!(n > 0.0)) throw NoHerald("single-rail swap never heralds at these parameters");
  const Matrix4 m = single_rail_matrix(c, params.p_d);
  // Both heralding patterns ([0,1] and [1,0]) carry the same weight.
  return {TwoQubitState::from_unnormalized(m), 2.0 * n};
}

}  // namespace detail

/// Single-rail swap: ensemble-averaged heralded state for parity `params.parity`.
inline HeraldOutcome herald_single_rail(const LinkParams& params) {
  return detail::single_rail_outcome(params, ensemble_average_visibility(params.vis, params.eps));
}

/// Single-rail swap at one fixed carrier-phase difference theta = theta_B - theta_A,
/// without ensemble averaging. The coherence <1,0|rho|0,1> carries |V| e^{i theta}.
inline HeraldOutcome herald_single_rail_at_phase(const LinkParams& params, double theta) {
  return detail::single_rail_outcome(params, std::polar(params.vis, theta));
}

/// Dual-rail swap. The emitters are balanced (gamma = 1/2); the gamma fields are ignored.
/// Carrier phases are global per side, so `eps` has no effect.
///
/// The coefficients below already sum over the four heralding patterns, so
/// their total weight is the success probability.
inline HeraldOutcome herald_dual_rail(const LinkParams& params) {
  if (params.encoding != Encoding::DualRail) throw ParameterError("dual-rail herald called with single-rail params");
  params.validate();
  const double ea = params.eta_a, eb = params.eta_b, ed = params.eta_d, pd = params.p_d;
  const double sign = params.parity == 0 ? 1.0 : -1.0;

  const double c1_0 = 0.25 * ea * eb * ed * ed;
  const double c3_0 = sign * c1_0 * params.vis * params.vis;
  const double c1_1 = 0.5 * (1 - pd) * ed * (ea + eb - 2 * ea * eb * ed) + pd * (1 - ea * ed) * (1 - eb * ed);

  const double w0 = std::pow(1 - pd, 4);
  const double w1 = pd * (1 - pd) * (1 - pd);
  const double n = 2 * w0 * c1_0 + 4 * w1 * c1_1;
  if (!(n > 0.0)) throw NoHerald("dual-rail swap never heralds at these parameters");

  Matrix4 m = Matrix4::Identity() * (w1 * c1_1);
  m(basis::k10, basis::k10) += w0 * c1_0;
  m(basis::k01, basis::k01) += w0 * c1_0;
  m(basis::k10, basis::k01) = w0 * c3_0;
  m(basis::k01, basis::k10) = w0 * c3_0;
  return {TwoQubitState::from_unnormalized(m), n};
}

inline HeraldOutcome herald(const LinkParams& params) {
  return params.encoding == Encoding::SingleRail ? herald_single_rail(params) : herald_dual_rail(params);
}

/// Lossy but otherwise ideal symmetric single-rail link, written directly in
/// terms of total transmissivity. Parity 0.
///
/// P = 2 sqrt(eta) (1-gamma) (1 - (1-gamma) sqrt(eta)); the state has weight
/// alpha1 on Psi+ and alpha2 on |0,0>, each normalized by the per-pattern
/// probability P/2.
inline HeraldOutcome ideal_single_rail_closed_form(double eta, double gamma) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    if (eta == 0.0) throw NoHerald("zero transmissivity: the swap never heralds");
    throw ParameterError("eta outside (0,1]");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma outside (0,1)");
  const double se = std::sqrt(eta);
  const double p = 2 * se * (1 - gamma) * (1 - (1 - gamma) * se);
  const double per_pattern = p / 2;
  const double alpha1 = gamma * (1 - gamma) * se / per_pattern;
  const double alpha2 = se * (1 - gamma) * (1 - gamma) * (1 - se) / per_pattern;
  Matrix4 m = Matrix4::Zero();
  m(basis::k10, basis::k10) = alpha1 / 2;
  m(basis::k01, basis::k01) = alpha1 / 2;
  m(basis::k10, basis::k01) = alpha1 / 2;
  m(basis::k01, basis::k10) = alpha1 / 2;
  m(basis::k00, basis::k00) = alpha2;
  return {TwoQubitState(m), p};
}

}  // namespace heraldswap
