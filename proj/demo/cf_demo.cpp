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

// Expands a/b over F_q(Y) and prints the convergents and the shortest
// solution of ax + by = 1.
//
//   cf_demo [q] [a] [b]      e.g. cf_demo 3 "Y+1" "Y^3+2Y+1"

#include "fqlattice/fqlattice.hpp"

#include <iostream>

using namespace fqlattice;

int main(int argc, char** argv) {
  try {
    const std::uint32_t q = argc > 1 ? static_cast<std::uint32_t>(std::stoul(argv[1])) : 2;
    const auto& F = GaloisField::get(q);
    const Poly a = parse_poly(F, argc > 2 ? argv[2] : "Y^2+1");
    const Poly b = parse_poly(F, argc > 3 ? argv[3] : "Y^3+Y+1");

    const RationalFn f(a, b);
    const CfExpansion e = cf_expand(f);
    const ConvergentTable t = convergents(e);
    std::cout << to_pretty(f) << " = " << to_string(e) << "\n";
    std::cout << "i,P_i,Q_i\n";
    for (int i = -1; i <= t.n(); ++i) std::cout << i << "," << to_pretty(t.P(i)) << "," << to_pretty(t.Q(i)) << "\n";

    if (coprime(a, b)) {
      const LatticeVec s = shortest_solution(a, b);
      std::cout << "shortest solution of ax+by=1: x=" << to_pretty(s.a) << " y=" << to_pretty(s.b) << "\n";
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
