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
#include <sstream>
#include <string>
#include <string_view>

#include "heraldswap/errors.hpp"

namespace heraldswap {

enum class Encoding { SingleRail, DualRail };

inline const char* to_string(Encoding e) { return e == Encoding::SingleRail ? "single" : "dual"; }

inline Encoding parse_encoding(std::string_view s) {
  if (s == "single" || s == "single-rail" || s == "single_rail") return Encoding::SingleRail;
  if (s == "dual" || s == "dual-rail" || s == "dual_rail") return Encoding::DualRail;
  throw ParameterError("unknown encoding '" + std::string(s) + "'");
}

/// Loss in dB for a transmissivity: -10 log10(eta).
inline double eta_to_db(double eta) { return 0.0 - 10.0 * std::log10(eta); }
inline double db_to_eta(double db) { return std::pow(10.0, -db / 10.0); }

/// Physical and protocol parameters of one elementary link.
///
/// `eta_a`, `eta_b` are the half-channel transmissivities to the midpoint
/// station, `eta_d` the detector efficiency, `p_d` the excess-noise probability
/// per detector per qubit slot, `vis` the mode overlap |V|, `eps` the variance
/// of each side's carrier phase, `gamma_a`/`gamma_b` the emitter
/// initialization weights (single rail only) and `parity` the heralded
/// parity bit m.
struct LinkParams {
  double eta_a = 1.0;
  double eta_b = 1.0;
  double eta_d = 1.0;
  double p_d = 0.0;
  double vis = 1.0;
  double eps = 0.0;
  double gamma_a = 0.5;
  double gamma_b = 0.5;
  Encoding encoding = Encoding::SingleRail;
  int parity = 0;

  /// eta_a = eta_b = sqrt(eta_total).
  static LinkParams symmetric(Encoding encoding, double eta_total, double gamma = 0.5) {
    if (!(eta_total >= 0.0 && eta_total <= 1.0)) throw ParameterError("total transmissivity must lie in [0,1]");
    LinkParams p;
    p.encoding = encoding;
    p.eta_a = p.eta_b = std::sqrt(eta_total);
    p.gamma_a = p.gamma_b = gamma;
    return p;
  }

  double total_eta() const { return eta_a * eta_b; }

  LinkParams with_total_eta(double eta_total) const {
    LinkParams p = *this;
    p.eta_a = p.eta_b = std::sqrt(eta_total);
    return p;
  }

  LinkParams with_gamma(double gamma) const {
    LinkParams p = *this;
    p.gamma_a = p.gamma_b = gamma;
    return p;
  }

  LinkParams with_parity(int m) const {
    LinkParams p = *this;
    p.parity = m;
    return p;
  }

  void validate() const {
    auto unit = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << name << " = " << v << " outside [0,1]";
        throw ParameterError(os.str());
      }
    };
    unit(eta_a, "eta_a");
    unit(eta_b, "eta_b");
    unit(eta_d, "eta_d");
    unit(vis, "vis");
    unit(gamma_a, "gamma_a");
    unit(gamma_b, "gamma_b");
    if (!(p_d >= 0.0 && p_d < 1.0)) throw ParameterError("p_d must lie in [0,1)");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParameterError("eps must be finite and >= 0");
    if (parity != 0 && parity != 1) throw ParameterError("parity must be 0 or 1");
  }
};

}  // namespace heraldswap
