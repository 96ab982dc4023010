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
#include <cstdint>
#include <exception>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "heraldswap/fock_oracle.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"

namespace heraldswap {

/// Latin-hypercube sample over eta_a, eta_b in [0.01, 1], eta_d in [0.5, 1],
/// log10 p_d in [-6, -1], vis in [0, 1], eps in [0, 0.5], gamma_a, gamma_b in
/// [0.05, 0.95]; the parity is drawn uniformly.
inline std::vector<LinkParams> latin_hypercube(int points, std::uint64_t seed, Encoding encoding) {
  if (points < 1) throw ParameterError("grid size must be >= 1");
  constexpr int kDims = 8;
  const std::array<std::pair<double, double>, kDims> bounds{
      {{0.01, 1.0}, {0.01, 1.0}, {0.5, 1.0}, {-6.0, -1.0}, {0.0, 1.0}, {0.0, 0.5}, {0.05, 0.95}, {0.05, 0.95}}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<std::vector<int>, kDims> strata;
  for (auto& s : strata) {
    s.resize(static_cast<std::size_t>(points));
    std::iota(s.begin(), s.end(), 0);
    std::shuffle(s.begin(), s.end(), rng);
  }
  std::vector<LinkParams> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    std::array<double, kDims> x{};
    for (int d = 0; d < kDims; ++d) {
      const double u = (strata[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] + unit(rng)) / points;
      x[static_cast<std::size_t>(d)] = bounds[static_cast<std::size_t>(d)].first +
                                        u * (bounds[static_cast<std::size_t>(d)].second - bounds[static_cast<std::size_t>(d)].first);
    }
    LinkParams p;
    p.encoding = encoding;
    p.eta_a = x[0];
    p.eta_b = x[1];
    p.eta_d = x[2];
    p.p_d = std::pow(10.0, x[3]);
    p.vis = x[4];
    p.eps = x[5];
    p.gamma_a = x[6];
    p.gamma_b = x[7];
    p.parity = unit(rng) < 0.5 ? 0 : 1;
    grid.push_back(p);
  }
  return grid;
}

struct VerifyOptions {
  int points = 200;
  std::uint64_t seed = 2026;
  int quadrature_order = fock::kDefaultQuadratureOrder;
  double tolerance = 1e-10;
  int jobs = 1;
  /// Negative control: added to one analytic matrix element at the middle grid point.
  double inject_error = 0.0;
};

struct VerifyPoint {
  LinkParams params;
  double state_deviation = 0.0;
  double p_deviation = 0.0;

  double deviation() const { return std::max(state_deviation, p_deviation); }
};

struct EncodingReport {
  Encoding encoding;
  double max_state_deviation = 0.0;
  double max_p_deviation = 0.0;
  VerifyPoint worst;
};

struct VerifyReport {
  std::vector<EncodingReport> encodings;
  double tolerance = 0.0;
  bool pass = true;
};

namespace detail {

inline VerifyPoint compare_point(const LinkParams& p, int order, double inject) {
  const HeraldOutcome analytic = herald(p);
  const HeraldOutcome oracle = fock::oracle_herald(p, order);
  Matrix4 a = analytic.state.matrix();
  a(basis::k10, basis::k10) += inject;
  return {p, max_abs_diff(a, oracle.state.matrix()), std::abs(analytic.p_succ - oracle.p_succ)};
}

}  // namespace detail

/// Analytic herald against the Fock-space oracle over a Latin-hypercube grid,
/// for both encodings. Results do not depend on `jobs`.
inline VerifyReport verify_oracle(const VerifyOptions& opts = {}) {
  if (opts.jobs < 1) throw ParameterError("jobs must be >= 1");
  VerifyReport report;
  report.tolerance = opts.tolerance;
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    const auto grid = latin_hypercube(opts.points, opts.seed, e);
    std::vector<VerifyPoint> results(grid.size());
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(opts.jobs));
    auto work = [&](std::size_t start) {
      try {
        for (std::size_t i = start; i < grid.size(); i += static_cast<std::size_t>(opts.jobs)) {
          const double inject = i == grid.size() / 2 ? opts.inject_error : 0.0;
          results[i] = detail::compare_point(grid[i], opts.quadrature_order, inject);
        }
      } catch (...) {
        failures[start] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < opts.jobs; ++j) pool.emplace_back(work, static_cast<std::size_t>(j));
    work(0);
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);

    EncodingReport er{e, 0.0, 0.0, results.front()};
    for (const auto& r : results) {
      er.max_state_deviation = std::max(er.max_state_deviation, r.state_deviation);
      er.max_p_deviation = std::max(er.max_p_deviation, r.p_deviation);
      if (r.deviation() > er.worst.deviation()) er.worst = r;
    }
    report.pass = report.pass && er.worst.deviation() <= opts.tolerance;
    report.encodings.push_back(er);
  }
  return report;
}

}  // namespace heraldswap
