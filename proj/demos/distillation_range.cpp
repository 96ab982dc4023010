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

// Maximum range after k pumping rounds against the fidelity-limited range.

#include <cstdio>

#include "heraldswap.hpp"

using namespace heraldswap;

int main() {
  std::printf("encoding,p_d,rounds,max_range_db,eta_lim_db\n");
  for (Encoding e : {Encoding::SingleRail, Encoding::DualRail}) {
    for (double pd : {1e-4, 1e-3, 1e-2}) {
      LinkParams p;
      p.encoding = e;
      p.p_d = pd;
      const double lim = distillation_limit(p).eta_max_db;
      for (int k : {0, 1, 2, 4, 8, 15}) {
        const double r = distilled_max_range(p, k).eta_max_db;
        std::printf("%s,%.0e,%d,%.4f,%.4f\n", to_string(e), pd, k, r, lim);
      }
    }
  }
  return 0;
}
