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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "heraldswap/errors.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/metrics.hpp"
#include "heraldswap/numerics.hpp"
#include "heraldswap/optimize.hpp"
#include "heraldswap/states.hpp"

namespace heraldswap {

inline constexpr double kDegenerateRoundProbability = 1e-15;
inline constexpr int kMaxPumpingRounds = 30;

struct DistillRound {
  TwoQubitState input_state;
  TwoQubitState output_state;
  double p_round;
  int round_index;
};

// ---------------------------------------------------------------------------
// Exact two-copy circuit.

namespace detail {

using Matrix16 = Eigen::Matrix<cplx, 16, 16>;

/// Our basis index i holds levels (a, b) with i = 2(1 - a) + (1 - b); the
/// computational index 2a + b is therefore 3 - i.
inline Matrix4 flip_basis(const Matrix4& m) { return m.reverse(); }

inline Matrix2 rx(double angle) {
  const cplx c(std::cos(angle / 2.0), 0.0), s(0.0, -std::sin(angle / 2.0));
  Matrix2 r;
  r << c, s, s, c;
  return r;
}

/// Qubit order (A source, B source, A target, B target), index 8a1 + 4b1 + 2a2 + b2,
/// computational levels.
inline const Matrix16& deutsch_unitary() {
  static const Matrix16 u = [] {
    const std::array<Matrix2, 4> gates{rx(M_PI / 2), rx(-M_PI / 2), rx(M_PI / 2), rx(-M_PI / 2)};
    Matrix16 local;
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) {
        cplx v = 1.0;
        for (int q = 0; q < 4; ++q) v *= gates[static_cast<std::size_t>(q)]((r >> (3 - q)) & 1, (c >> (3 - q)) & 1);
        local(r, c) = v;
      }
    Matrix16 cnots = Matrix16::Zero();
    for (int i = 0; i < 16; ++i) {
      int j = i;
      if (i & 8) j ^= 2;
      if (i & 4) j ^= 1;
      cnots(j, i) = 1.0;
    }
    return Matrix16(cnots * local);
  }();
  return u;
}

/// Unnormalized source-pair operators for each target outcome 2a2 + b2, in our basis.
inline std::array<Matrix4, 4> deutsch_branches(const TwoQubitState& rho) {
  const Matrix4 c = flip_basis(rho.matrix());
  Matrix16 joint;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) joint.block<4, 4>(4 * s, 4 * t) = c(s, t) * c;
  const Matrix16& u = deutsch_unitary();
  const Matrix16 out = u * joint * u.adjoint();
  std::array<Matrix4, 4> branches;
  for (int t = 0; t < 4; ++t) {
    Matrix4 red;
    for (int s = 0; s < 4; ++s)
      for (int s2 = 0; s2 < 4; ++s2) red(s, s2) = out(4 * s + t, 4 * s2 + t);
    branches[static_cast<std::size_t>(t)] = flip_basis(red);
  }
  return branches;
}

}  // namespace detail

/// Probabilities of the target outcomes 00, 01, 10, 11.
inline std::array<double, 4> deutsch_outcome_probabilities(const TwoQubitState& rho) {
  const auto b = detail::deutsch_branches(rho);
  return {b[0].trace().real(), b[1].trace().real(), b[2].trace().real(), b[3].trace().real()};
}

/// One round of the Deutsch protocol on two identical copies, kept when both
/// target measurements agree. Both agreeing outcomes leave the source pair in
/// the same Bell frame, so no Pauli correction follows.
inline DistillRound deutsch_round_exact(const TwoQubitState& rho, int round_index = 1) {
  const auto b = detail::deutsch_branches(rho);
  const Matrix4 kept = b[0] + b[3];
  const double p = kept.trace().real();
  if (!(p >= kDegenerateRoundProbability)) throw DegenerateDistillation("distillation round success probability below 1e-15");
  return {rho, TwoQubitState::from_unnormalized(kept), p, round_index};
}

// ---------------------------------------------------------------------------
// Bell-diagonal maps over (A, B, C, D) = (Psi+, Psi-, Phi+, Phi-).

struct BellMapResult {
  BellDiagonalVec vec;
  double p_round;
};

inline BellMapResult deutsch_round_map(const BellDiagonalVec& v) {
  v.validate();
  const double a = v.psi_plus, b = v.psi_minus, c = v.phi_plus, d = v.phi_minus;
  const double n = (a + d) * (a + d) + (b + c) * (b + c);
  if (!(n >= kDegenerateRoundProbability)) throw DegenerateDistillation("distillation round success probability below 1e-15");
  return {{(a * a + d * d) / n, 2 * a * d / n, (b * b + c * c) / n, 2 * b * c / n}, n};
}

/// The raw update rules lose trace; the result is renormalized and the
/// raw sum returned as p_round.
inline BellMapResult bennett_round_map(const BellDiagonalVec& v) {
  v.validate();
  const double a = v.psi_plus, b = v.psi_minus, c = v.phi_plus, d = v.phi_minus;
  const BellDiagonalVec raw{(a * a + b * b) / 2, a * b, (c * c + d * d) / 2, c * d};
  const double n = raw.sum();
  if (!(n >= kDegenerateRoundProbability)) throw DegenerateDistillation("distillation round success probability below 1e-15");
  return {raw.normalized(), n};
}

// ---------------------------------------------------------------------------
// Pumping.

enum class DistillEngine { Exact, BellDiagonalMap };

inline const char* to_string(DistillEngine e) { return e == DistillEngine::Exact ? "exact" : "map"; }

inline DistillEngine parse_engine(std::string_view s) {
  if (s == "exact") return DistillEngine::Exact;
  if (s == "map") return DistillEngine::BellDiagonalMap;
  throw ParameterError("engine must be 'exact' or 'map'");
}

/// Rate convention: R_k = max(I(rho_k), 0) * P_herald^(2^k) * prod_j p_j^(2^(k-j)) / 2^k,
/// i.e. ebits per copy times the success probability of a full 2^k-leaf
/// tree, per channel attempt.
struct PumpingSchedule {
  int rounds = 0;
  DistillEngine engine = DistillEngine::Exact;
  bool approximate = false;  // map engine applied to a state with Bell-basis coherences
  std::vector<DistillRound> per_round;
  std::uint64_t copies_consumed = 1;
  TwoQubitState final_state = TwoQubitState::maximally_mixed();
  double hashing = 0.0;  // raw I(rho_k)
  double fidelity = 0.0;  // against Psi+
  double cumulative_rate = 0.0;
};

/// Maps a parity-1 heralded state into the Psi+ frame with a local Z on memory A.
inline TwoQubitState to_psi_plus_frame(const TwoQubitState& state, int parity) {
  if (parity == 0) return state;
  Matrix2 z = Matrix2::Identity();
  z(1, 1) = -1.0;
  return apply_local(state, z, Matrix2::Identity());
}

inline PumpingSchedule pump(const HeraldOutcome& initial, int rounds, DistillEngine engine = DistillEngine::Exact,
                            int parity = 0) {
  if (rounds < 0 || rounds > kMaxPumpingRounds) throw ParameterError("rounds outside [0, 30]");
  PumpingSchedule s;
  s.rounds = rounds;
  s.engine = engine;
  s.copies_consumed = std::uint64_t{1} << rounds;

  TwoQubitState current = to_psi_plus_frame(initial.state, parity);
  if (engine == DistillEngine::BellDiagonalMap) {
    s.approximate = bell_offdiagonal_norm(current) > 1e-12;
    if (s.approximate) current = bell_diagonal_projection(current).to_state();
  }

  // log of the tree success probability, accumulated as sum of 2^(k-j) log p_j.
  double log_tree = std::ldexp(std::log(initial.p_succ), rounds);
  BellDiagonalVec vec = engine == DistillEngine::BellDiagonalMap ? bell_diagonal_projection(current) : BellDiagonalVec{};
  for (int j = 1; j <= rounds; ++j) {
    DistillRound r{current, current, 0.0, j};
    if (engine == DistillEngine::Exact) {
      r = deutsch_round_exact(current, j);
    } else {
      const auto m = deutsch_round_map(vec);
      vec = m.vec;
      r.output_state = vec.to_state();
      r.p_round = m.p_round;
    }
    log_tree += std::ldexp(std::log(r.p_round), rounds - j);
    current = r.output_state;
    s.per_round.push_back(r);
  }
  s.final_state = current;
  s.hashing = hashing_bound(current);
  s.fidelity = fidelity_bell(current, BellState::PsiPlus);
  s.cumulative_rate = std::max(s.hashing, 0.0) * std::exp(log_tree) / static_cast<double>(s.copies_consumed);
  return s;
}

inline PumpingSchedule pump(const LinkParams& params, int rounds, DistillEngine engine = DistillEngine::Exact) {
  return pump(herald(params), rounds, engine, params.parity);
}

// ---------------------------------------------------------------------------
// Distillation-limited range.

/// Loss at which the raw hashing bound after `rounds` pumping rounds reaches
/// zero. Single-rail gamma follows opts.gamma_choice.
inline RangeResult distilled_max_range(const LinkParams& params, int rounds,
                                       DistillEngine engine = DistillEngine::Exact, const RangeOptions& opts = {}) {
  params.validate();
  const double ninf = -std::numeric_limits<double>::infinity();
  auto hashing_at = [&](const LinkParams& p) {
    try {
      return pump(p, rounds, engine).hashing;
    } catch (const NoHerald&) {
      return ninf;
    } catch (const DegenerateDistillation&) {
      return ninf;
    }
  };
  const GammaChoice choice = detail::resolve(opts.gamma_choice, GammaChoice::HighLossRateOptimal);
  const LinkParams base = detail::apply_gamma_choice(params, choice);
  auto g = [&](double db) {
    const LinkParams p = base.with_total_eta(db_to_eta(db));
    if (choice != GammaChoice::MaximizeMetric || p.encoding == Encoding::DualRail) return hashing_at(p);
    return numerics::maximize([&](double gamma) { return hashing_at(p.with_gamma(gamma)); }, kGammaMin, kGammaMax, 33)
        .value;
  };
  return find_range(g, RangeMetric::HashingZero, opts);
}

/// The loss at which the heralded fidelity reaches 1/2.
inline RangeResult distillation_limit(const LinkParams& params, const RangeOptions& opts = {}) {
  return eta_lim(params, opts);
}

struct DistillationLimitCheck {
  RangeResult limit;      // F = 1/2 root
  RangeResult saturated;  // hashing-zero root after `rounds` rounds
  double gap_db;          // |saturated - limit|
};

/// Cross-checks the fidelity root against the range reached after many pumping rounds.
inline DistillationLimitCheck check_distillation_limit(const LinkParams& params, int rounds = 15,
                                                       DistillEngine engine = DistillEngine::Exact,
                                                       const RangeOptions& opts = {}) {
  DistillationLimitCheck c{distillation_limit(params, opts), distilled_max_range(params, rounds, engine, opts), 0.0};
  c.gap_db = std::abs(c.saturated.eta_max_db - c.limit.eta_max_db);
  return c;
}

}  // namespace heraldswap
