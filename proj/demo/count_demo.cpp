// Copyright 2026 The fqlattice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Primitive vectors by norm level for a few small fields and congruence
// ideals, with the sharp/non-sharp split.

#include "fqlattice/fqlattice.hpp"

#include <iostream>

using namespace fqlattice;

int main() {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    for (const char* gen : {"1", "Y", "Y^2+Y"}) {
      const IdealSpec I(parse_poly(F, gen));
      std::cout << "q=" << q << " I=(" << gen << ")  c_I=" << to_string(c_I(I)) << "\n";
      for (int n = 1; n <= (q == 2 ? 5 : 3); ++n) {
        const LevelCounts c = count_level(F, n, I, 1);
        std::cout << "  n=" << n << "  count=" << c.sharp + c.non_sharp << " (sharp " << c.sharp << ")"
                  << "  main=" << to_string(counting_main_term(I, n)) << "\n";
      }
    }
  }
  return 0;
}
