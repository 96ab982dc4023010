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

// Rate per swap attempt versus total channel loss for both encodings, with
// the repeaterless bound. Single-rail gamma is re-optimized at each point.

#include <cstdio>

#include "heraldswap.hpp"

using namespace heraldswap;

int main() {
  std::printf("eta_total_db,eta_half_db,single_gamma,single_rate,single_fidelity,dual_rate,dual_fidelity,d2\n");
  for (double db = 0.0; db <= 80.0; db += 4.0) {
    LinkParams single = LinkParams::symmetric(Encoding::SingleRail, db_to_eta(db));
    single.p_d = 1e-4;
    LinkParams dual = single;
    dual.encoding = Encoding::DualRail;
    const GammaOptimum s = optimize_gamma(single);
    const LinkMetrics d = evaluate(dual);
    std::printf("%.1f,%.1f,%.6f,%.6e,%.6f,%.6e,%.6f,%.6e\n", db, db / 2, s.gamma, s.metrics.rate, s.metrics.fidelity,
                d.rate, d.fidelity, d.d2_bound);
  }
  const CrossoverResult c = crossover_loss(GammaPolicy::maximize_rate());
  std::fprintf(stderr, "ideal crossover at %.3f dB half-channel loss\n", c.half_loss_db);
  return 0;
}
