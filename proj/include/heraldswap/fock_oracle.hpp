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
#include <complex>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "heraldswap/errors.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/numerics.hpp"
#include "heraldswap/states.hpp"

namespace heraldswap::fock {

/// At most two photons enter the swap, so this cutoff is exact.
inline constexpr int kMaxOccupation = 2;
inline constexpr int kDefaultQuadratureOrder = 20;

using Occupation = std::vector<int>;
using MemoryAmplitudes = Eigen::VectorXcd;
using Matrix2x2 = Eigen::Matrix2cd;

/// Pure state of emitter memories and optical modes, stored sparsely as
/// occupation vector -> memory amplitude vector. Memories are ordered as
/// added (A before B), each in the basis {|1>, |0>}.
class FockRegister {
 public:
  FockRegister(std::vector<std::string> modes, int memories) : modes_(std::move(modes)), memories_(memories) {
    if (memories < 0 || memories > 2) throw ParameterError("register holds at most two memories");
  }

  const std::vector<std::string>& modes() const { return modes_; }
  int memories() const { return memories_; }
  int memory_dim() const { return 1 << memories_; }
  const std::map<Occupation, MemoryAmplitudes>& terms() const { return terms_; }

  bool has_mode(const std::string& name) const {
    for (const auto& m : modes_)
      if (m == name) return true;
    return false;
  }

  std::size_t mode_index(const std::string& name) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i] == name) return i;
    throw ParameterError("unknown mode '" + name + "'");
  }

  /// Adds `amps` to the term with occupation `occ`.
  void add(const Occupation& occ, const MemoryAmplitudes& amps) {
    if (occ.size() != modes_.size()) throw ParameterError("occupation length does not match mode count");
    if (amps.size() != memory_dim()) throw ParameterError("amplitude length does not match memory dimension");
    for (int n : occ)
      if (n > kMaxOccupation) throw TruncationError("mode occupation above the two-photon cutoff");
    auto [it, inserted] = terms_.try_emplace(occ, amps);
    if (!inserted) it->second += amps;
  }

  /// Appends a vacuum mode.
  void add_mode(const std::string& name) {
    if (has_mode(name)) throw ParameterError("mode '" + name + "' already exists");
    modes_.push_back(name);
    std::map<Occupation, MemoryAmplitudes> grown;
    for (auto& [occ, amps] : terms_) {
      Occupation o = occ;
      o.push_back(0);
      grown.emplace(std::move(o), std::move(amps));
    }
    terms_ = std::move(grown);
  }

  double norm() const {
    double s = 0.0;
    for (const auto& [occ, amps] : terms_) s += amps.squaredNorm();
    return std::sqrt(s);
  }

  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<std::string> modes_;
  int memories_;
  std::map<Occupation, MemoryAmplitudes> terms_;
};

/// Memory-photon register of one emitter. Single rail:
/// sqrt(g)|1>|0> + e^{i theta} sqrt(1-g)|0>|1> on mode "<side>.s". Dual rail:
/// e^{i theta}(|1>|1,0> + |0>|0,1>)/sqrt(2) on modes "<side>.h", "<side>.v";
/// gamma is ignored there.
inline FockRegister emit(Encoding encoding, double gamma, double theta, const std::string& side) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma outside [0,1]");
  const cplx phase = std::polar(1.0, theta);
  if (encoding == Encoding::SingleRail) {
    FockRegister r({side + ".s"}, 1);
    r.add({0}, (MemoryAmplitudes(2) << std::sqrt(gamma), 0.0).finished());
    r.add({1}, (MemoryAmplitudes(2) << 0.0, phase * std::sqrt(1.0 - gamma)).finished());
    return r;
  }
  FockRegister r({side + ".h", side + ".v"}, 1);
  const double h = 1.0 / std::sqrt(2.0);
  r.add({1, 0}, (MemoryAmplitudes(2) << phase * h, 0.0).finished());
  r.add({0, 1}, (MemoryAmplitudes(2) << 0.0, phase * h).finished());
  return r;
}

/// Joint register, memories of `a` first.
inline FockRegister tensor(const FockRegister& a, const FockRegister& b) {
  std::vector<std::string> modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());
  FockRegister r(modes, a.memories() + b.memories());
  for (const auto& [oa, va] : a.terms())
    for (const auto& [ob, vb] : b.terms()) {
      Occupation o = oa;
      o.insert(o.end(), ob.begin(), ob.end());
      MemoryAmplitudes v(va.size() * vb.size());
      for (Eigen::Index i = 0; i < va.size(); ++i) v.segment(i * vb.size(), vb.size()) = va[i] * vb;
      r.add(o, v);
    }
  return r;
}

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace detail

/// Linear two-mode transformation of creation operators:
/// a_i^dag -> u(0,0) a_i^dag + u(1,0) a_j^dag, a_j^dag -> u(0,1) a_i^dag + u(1,1) a_j^dag.
inline FockRegister apply_two_mode(const FockRegister& reg, const std::string& mode_i, const std::string& mode_j,
                                   const Matrix2x2& u) {
  const std::size_t i = reg.mode_index(mode_i), j = reg.mode_index(mode_j);
  if (i == j) throw ParameterError("two-mode transformation needs distinct modes");
  FockRegister out(reg.modes(), reg.memories());
  for (const auto& [occ, amps] : reg.terms()) {
    const int ni = occ[i], nj = occ[j];
    const double in_norm = std::sqrt(detail::factorial(ni) * detail::factorial(nj));
    for (int k1 = 0; k1 <= ni; ++k1) {
      const cplx f1 = detail::binomial(ni, k1) * std::pow(u(0, 0), k1) * std::pow(u(1, 0), ni - k1);
      for (int k2 = 0; k2 <= nj; ++k2) {
        const cplx f2 = detail::binomial(nj, k2) * std::pow(u(0, 1), k2) * std::pow(u(1, 1), nj - k2);
        const cplx f = f1 * f2;
        if (f == cplx(0.0)) continue;
        const int oi = k1 + k2, oj = ni + nj - oi;
        Occupation o = occ;
        o[i] = oi;
        o[j] = oj;
        const double out_norm = std::sqrt(detail::factorial(oi) * detail::factorial(oj));
        out.add(o, amps * (f * out_norm / in_norm));
      }
    }
  }
  return out;
}

/// Pure-loss channel on `mode`: couples it to a fresh environment mode,
/// |1> -> sqrt(eta)|1>|0>_E + sqrt(1-eta)|0>|1>_E.
inline FockRegister apply_loss(const FockRegister& reg, const std::string& mode, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("transmissivity outside [0,1]");
  FockRegister r = reg;
  int k = 0;
  std::string env;
  do env = mode + "~env" + std::to_string(k++);
  while (r.has_mode(env));
  r.add_mode(env);
  const double t = std::sqrt(eta), l = std::sqrt(1.0 - eta);
  Matrix2x2 u;
  u << t, -l, l, t;
  return apply_two_mode(r, mode, env, u);
}

/// Balanced beamsplitter a_i -> (a_i + a_j)/sqrt(2), a_j -> (-a_i + a_j)/sqrt(2).
/// Output port i is c, port j is d.
inline FockRegister apply_beamsplitter(const FockRegister& reg, const std::string& mode_i, const std::string& mode_j) {
  const double h = 1.0 / std::sqrt(2.0);
  Matrix2x2 u;
  u << h, -h, h, h;
  return apply_two_mode(reg, mode_i, mode_j, u);
}

inline std::string perp(const std::string& mode) { return mode + ".perp"; }

/// Splits the photon of `mode` into |V| of the matched wavepacket plus
/// sqrt(1 - |V|^2) of an orthogonal one held in the new mode perp(mode).
inline FockRegister distinguishability_embed(const FockRegister& reg, const std::string& mode, double vis) {
  if (!(vis >= 0.0 && vis <= 1.0)) throw ParameterError("vis outside [0,1]");
  FockRegister r = reg;
  r.add_mode(perp(mode));
  const double o = std::sqrt(1.0 - vis * vis);
  Matrix2x2 u;
  u << vis, -o, o, vis;
  return apply_two_mode(r, mode, perp(mode), u);
}

// ---------------------------------------------------------------------------
// Detection.

struct DetectionModel {
  double eta_d = 1.0;  // applied upstream as loss, see build_swap_register
  double p_d = 0.0;
  bool resolving = true;

  void validate() const {
    if (!(eta_d >= 0.0 && eta_d <= 1.0)) throw ParameterError("eta_d outside [0,1]");
    if (!(p_d >= 0.0 && p_d < 1.0)) throw ParameterError("p_d must lie in [0,1)");
    if (!resolving) throw UnsupportedCase("only photon-number-resolving detectors are modelled");
  }
};

using Pattern = std::vector<int>;

/// Detectors are sets of modes whose counts add. Single rail: [c, d].
/// Dual rail: [c1, c2, d1, d2].
struct SwapStation {
  Encoding encoding = Encoding::SingleRail;
  std::vector<std::vector<std::string>> detectors;
  std::vector<std::pair<Pattern, int>> success;  // pattern -> parity

  static SwapStation for_encoding(Encoding e) {
    SwapStation s;
    s.encoding = e;
    if (e == Encoding::SingleRail) {
      s.detectors = {{"A.s", perp("A.s")}, {"B.s", perp("B.s")}};
      s.success = {{{0, 1}, 0}, {{1, 0}, 1}};
    } else {
      s.detectors = {{"A.h", perp("A.h")}, {"A.v", perp("A.v")}, {"B.h", perp("B.h")}, {"B.v", perp("B.v")}};
      s.success = {{{1, 1, 0, 0}, 0}, {{0, 0, 1, 1}, 0}, {{1, 0, 0, 1}, 1}, {{0, 1, 1, 0}, 1}};
    }
    return s;
  }

  /// Parity heralded by `pattern`; PatternError if it is not a success pattern.
  int parity_of(const Pattern& pattern) const {
    for (const auto& [p, m] : success)
      if (p == pattern) return m;
    throw PatternError("pattern is not a heralding pattern for this encoding");
  }
};

/// Environment-traced memory operator for each true detector-count vector.
inline std::map<Pattern, Matrix4> count_operators(const FockRegister& reg, const SwapStation& station) {
  if (reg.memory_dim() != 4) throw ParameterError("detection needs a two-memory register");
  std::vector<std::vector<std::size_t>> det_modes;
  for (const auto& d : station.detectors) {
    std::vector<std::size_t> idx;
    for (const auto& m : d)
      if (reg.has_mode(m)) idx.push_back(reg.mode_index(m));
    if (idx.empty()) throw ParameterError("detector watches no existing mode");
    det_modes.push_back(idx);
  }
  std::map<Pattern, Matrix4> ops;
  for (const auto& [occ, amps] : reg.terms()) {
    Pattern counts;
    for (const auto& idx : det_modes) {
      int n = 0;
      for (std::size_t k : idx) n += occ[k];
      counts.push_back(n);
    }
    const Vector4 v = amps;
    auto [it, inserted] = ops.try_emplace(counts, Matrix4::Zero());
    it->second += v * v.adjoint();
  }
  return ops;
}

namespace detail {

/// P(observed | true) with an independent Bernoulli(p_d) extra count per detector.
inline double dark_weight(const Pattern& observed, const Pattern& truth, double p_d) {
  double w = 1.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const int extra = observed[i] - truth[i];
    if (extra == 0)
      w *= 1.0 - p_d;
    else if (extra == 1)
      w *= p_d;
    else
      return 0.0;
  }
  return w;
}

inline Matrix4 observed_operator(const std::map<Pattern, Matrix4>& ops, const Pattern& observed, double p_d) {
  Matrix4 m = Matrix4::Zero();
  for (const auto& [truth, op] : ops) {
    if (truth.size() != observed.size()) throw PatternError("pattern length does not match detector count");
    const double w = dark_weight(observed, truth, p_d);
    if (w != 0.0) m += w * op;
  }
  return m;
}

}  // namespace detail

/// Unnormalized memory operator for any registered pattern; its trace is the
/// pattern probability.
inline Matrix4 pattern_operator(const FockRegister& reg, const SwapStation& station, const DetectionModel& det,
                                const Pattern& observed) {
  det.validate();
  if (observed.size() != station.detectors.size()) throw PatternError("pattern length does not match detector count");
  return detail::observed_operator(count_operators(reg, station), observed, det.p_d);
}

inline double pattern_probability(const FockRegister& reg, const SwapStation& station, const DetectionModel& det,
                                  const Pattern& observed) {
  return pattern_operator(reg, station, det, observed).trace().real();
}

/// Probability of every pattern with non-zero weight, failures included.
inline std::map<Pattern, double> all_pattern_probabilities(const FockRegister& reg, const SwapStation& station,
                                                           const DetectionModel& det) {
  det.validate();
  const auto ops = count_operators(reg, station);
  std::set<Pattern> observed;
  const std::size_t nd = station.detectors.size();
  for (const auto& [truth, op] : ops)
    for (unsigned mask = 0; mask < (1u << nd); ++mask) {
      Pattern p = truth;
      for (std::size_t i = 0; i < nd; ++i) p[i] += (mask >> i) & 1u;
      observed.insert(p);
    }
  std::map<Pattern, double> probs;
  for (const auto& p : observed) probs[p] = detail::observed_operator(ops, p, det.p_d).trace().real();
  return probs;
}

struct PatternHerald {
  TwoQubitState state;
  double probability;
  int parity;
};

/// Conditional memory state for one heralding pattern.
inline PatternHerald measure_and_herald(const FockRegister& reg, const SwapStation& station, const DetectionModel& det,
                                        const Pattern& pattern) {
  const int parity = station.parity_of(pattern);
  const Matrix4 m = pattern_operator(reg, station, det, pattern);
  return {TwoQubitState::from_unnormalized(m), m.trace().real(), parity};
}

// ---------------------------------------------------------------------------
// End-to-end oracle.

/// Emission, channel loss, detector loss (folded in before the beamsplitter),
/// mode mismatch on side B, then one beamsplitter per signal mode pair.
inline FockRegister build_swap_register(const LinkParams& p, double theta_a, double theta_b) {
  p.validate();
  auto side = [&](const std::string& name, double gamma, double eta, double theta, bool mismatched) {
    FockRegister r = emit(p.encoding, gamma, theta, name);
    const std::vector<std::string> signal = r.modes();
    for (const auto& m : signal) {
      r = apply_loss(r, m, eta);
      r = apply_loss(r, m, p.eta_d);
      if (p.vis == 1.0) continue;
      if (mismatched)
        r = distinguishability_embed(r, m, p.vis);
      else
        r.add_mode(perp(m));
    }
    return r;
  };
  const double ga = p.encoding == Encoding::DualRail ? 0.5 : p.gamma_a;
  const double gb = p.encoding == Encoding::DualRail ? 0.5 : p.gamma_b;
  FockRegister a = side("A", ga, p.eta_a, theta_a, false);
  FockRegister b = side("B", gb, p.eta_b, theta_b, true);
  FockRegister r = tensor(a, b);
  const std::vector<std::string> signal = p.encoding == Encoding::SingleRail ? std::vector<std::string>{"s"}
                                                                             : std::vector<std::string>{"h", "v"};
  for (const auto& m : signal) {
    r = apply_beamsplitter(r, "A." + m, "B." + m);
    if (p.vis < 1.0) r = apply_beamsplitter(r, perp("A." + m), perp("B." + m));
  }
  return r;
}

/// Heralded operators at one phase pair: index 0 and 1 hold the summed
/// pattern operators of each parity.
inline std::array<Matrix4, 2> parity_operators(const LinkParams& p, double theta_a, double theta_b) {
  const FockRegister r = build_swap_register(p, theta_a, theta_b);
  const SwapStation station = SwapStation::for_encoding(p.encoding);
  const auto ops = count_operators(r, station);
  std::array<Matrix4, 2> out{Matrix4::Zero(), Matrix4::Zero()};
  for (const auto& [pattern, parity] : station.success)
    out[static_cast<std::size_t>(parity)] += detail::observed_operator(ops, pattern, p.p_d);
  return out;
}

/// E[f(theta')] over theta' ~ N(0, 2 eps), the carrier-phase difference of
/// two sides with independent N(0, eps) phases.
template <class F>
auto phase_average(F&& f, double eps, int order = kDefaultQuadratureOrder) {
  if (!(eps >= 0.0)) throw ParameterError("eps must be >= 0");
  if (order < 8) throw ParameterError("quadrature order must be >= 8");
  return numerics::gaussian_expectation(f, 2.0 * eps, numerics::gauss_hermite(order));
}

/// Brute-force heralded outcome for `p`, phase-averaged over side B.
inline HeraldOutcome oracle_herald(const LinkParams& p, int order = kDefaultQuadratureOrder) {
  using Pair = Eigen::Matrix<cplx, 4, 8>;
  auto at = [&](double theta) {
    const auto ops = parity_operators(p, 0.0, theta);
    Pair m;
    m << ops[0], ops[1];
    return m;
  };
  const Pair avg = phase_average(at, p.eps, order);
  const Matrix4 kept = avg.block<4, 4>(0, 4 * p.parity);
  const double total = avg.block<4, 4>(0, 0).trace().real() + avg.block<4, 4>(0, 4).trace().real();
  return {TwoQubitState::from_unnormalized(kept), total};
}

}  // namespace heraldswap::fock
