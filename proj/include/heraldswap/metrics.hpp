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
#include <limits>

#include "heraldswap/errors.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/states.hpp"

namespace heraldswap {

/// h2(x) = -x log2 x - (1-x) log2 (1-x), zero at both endpoints.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("binary_entropy argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

/// <target| rho |target>.
inline double fidelity_bell(const TwoQubitState& state, BellState target) {
  const Vector4 v = bell_vector(target);
  return (v.adjoint() * state.matrix() * v)(0, 0).real();
}

/// The Bell state a heralded state of parity m approximates.
inline BellState heralded_target(int parity) { return parity == 0 ? BellState::PsiPlus : BellState::PsiMinus; }

/// S(rho_keep) - S(rho_AB).
inline double coherent_information(const TwoQubitState& state, Party keep) {
  return von_neumann_entropy(partial_trace(state, keep)) - von_neumann_entropy(state);
}

/// Hashing bound: the larger of the two coherent informations. Raw value, may be negative.
inline double hashing_bound(const TwoQubitState& state) {
  const double s_ab = von_neumann_entropy(state);
  const double s_a = von_neumann_entropy(partial_trace(state, Party::A));
  const double s_b = von_neumann_entropy(partial_trace(state, Party::B));
  return std::max(s_a, s_b) - s_ab;
}

/// Ebits per swap attempt: max(I, 0) * p_succ.
inline double rate(double hashing, double p_succ) { return std::max(hashing, 0.0) * p_succ; }

inline double rate(const TwoQubitState& state, double p_succ) { return rate(hashing_bound(state), p_succ); }

/// Repeaterless bound -log2(1 - sqrt(eta)). Returns +infinity at eta = 1.
inline double repeaterless_bound(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("repeaterless_bound: eta outside [0,1]");
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  return -std::log2(1.0 - std::sqrt(eta));
}

struct LinkMetrics {
  double fidelity = 0.0;
  double hashing = 0.0;  // raw, may be negative
  double p_succ = 0.0;
  double rate = 0.0;
  double d2_bound = 0.0;

  double hashing_clamped() const { return std::max(hashing, 0.0); }
};

/// Metrics of an already computed outcome. Fidelity is taken against the
/// Bell state matching `parity`.
inline LinkMetrics evaluate(const HeraldOutcome& outcome, double total_eta, int parity) {
  LinkMetrics m;
  m.fidelity = fidelity_bell(outcome.state, heralded_target(parity));
  m.hashing = hashing_bound(outcome.state);
  m.p_succ = outcome.p_succ;
  m.rate = rate(m.hashing, m.p_succ);
  m.d2_bound = repeaterless_bound(total_eta);
  return m;
}

inline LinkMetrics evaluate(const LinkParams& params) {
  return evaluate(herald(params), params.total_eta(), params.parity);
}

// ---------------------------------------------------------------------------
// Closed forms for noiseless links (p_d = 0).

enum class TableCase {
  SymmetricMatched,      // eta_a = eta_b, gamma_a = gamma_b, effective |V| = 1
  AsymmetricMatched,     // eta_a != eta_b or gamma_a != gamma_b, effective |V| = 1
  SymmetricVisibility,   // eta_a = eta_b, gamma_a = gamma_b, any |V|
};

namespace detail {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); }

}  // namespace detail

/// Which closed-form row applies, or UnsupportedCase. Detector efficiency is
/// folded into the half-channel transmissivities.
inline TableCase classify_table_case(const LinkParams& p) {
  p.validate();
  if (p.p_d != 0.0) throw UnsupportedCase("closed forms require p_d = 0");
  if (p.encoding == Encoding::DualRail) return p.vis == 1.0 ? TableCase::SymmetricMatched : TableCase::SymmetricVisibility;
  const bool symmetric = detail::close(p.eta_a, p.eta_b) && detail::close(p.gamma_a, p.gamma_b);
  const double v = ensemble_average_visibility(p.vis, p.eps);
  if (symmetric) return v == 1.0 ? TableCase::SymmetricMatched : TableCase::SymmetricVisibility;
  if (v == 1.0) return TableCase::AsymmetricMatched;
  throw UnsupportedCase("no closed form for an asymmetric link with imperfect visibility");
}

/// Closed-form fidelity, hashing bound and success probability of a noiseless link.
inline LinkMetrics special_case_tables(const LinkParams& p) {
  const TableCase which = classify_table_case(p);
  const double ta = p.eta_a * p.eta_d;
  const double tb = p.eta_b * p.eta_d;
  LinkMetrics m;
  m.d2_bound = repeaterless_bound(p.total_eta());

  if (p.encoding == Encoding::DualRail) {
    const double v2 = p.vis * p.vis;
    m.hashing = 1.0 - binary_entropy((1.0 - v2) / 2.0);
    m.fidelity = (1.0 + v2) / 2.0;
    m.p_succ = ta * tb / 2.0;
  } else if (which == TableCase::AsymmetricMatched) {
    const double ga = p.gamma_a, gb = p.gamma_b;
    const double denom = (1 - gb) * tb + (1 - ga) * ta - 2 * ta * tb * (1 - ga) * (1 - gb);
    if (!(denom > 0.0)) throw NoHerald("single-rail swap never heralds at these parameters");
    const double xb = tb * (1 - gb) * ga / denom;  // weight of |1,0>
    const double xd = ta * (1 - ga) * gb / denom;  // weight of |0,1>
    m.hashing = std::max(binary_entropy(xb), binary_entropy(xd)) - binary_entropy(std::min(xb + xd, 1.0));
    m.fidelity = (xb + xd + 2 * std::sqrt(xb * xd)) / 2.0;
    m.p_succ = denom;
  } else {
    const double g = p.gamma_a;
    const double t = ta;
    const double v = ensemble_average_visibility(p.vis, p.eps);
    const double denom = 1 - (1 - g) * t;
    if (!(t > 0.0 && g < 1.0)) throw NoHerald("single-rail swap never heralds at these parameters");
    const double s = g / denom;
    const double lp = s * (1 + v) / 2, lm = s * (1 - v) / 2;
    m.hashing = binary_entropy(s / 2) + detail::xlog2x(lp) + detail::xlog2x(lm) + detail::xlog2x(1 - s);
    m.fidelity = lp;
    m.p_succ = 2 * t * (1 - g) * denom;
  }
  m.rate = rate(m.hashing, m.p_succ);
  return m;
}

}  // namespace heraldswap
