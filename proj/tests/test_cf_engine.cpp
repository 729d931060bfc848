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

#include "fqlattice/cf_engine.hpp"
#include "fqlattice/harness.hpp"

#include "catch_amalgamated.hpp"

using namespace fqlattice;

namespace {

Poly P(const GaloisField& F, const char* s) { return parse_poly(F, s); }
RationalFn R(const GaloisField& F, const char* num, const char* den = "1") { return RationalFn(P(F, num), P(F, den)); }

}  // namespace

TEST_CASE("artin map", "[cf]") {
  const auto& F = GaloisField::get(2);
  CHECK(artin_step(R(F, "1", "Y")).is_zero());
  CHECK(artin_step(R(F, "1", "Y+1")).is_zero());
  CHECK(artin_step(R(F, "Y", "Y^2+1")) == R(F, "1", "Y"));
  CHECK_THROWS(artin_step(RationalFn(F)));
  CHECK_THROWS(artin_step(R(F, "Y", "Y+1")));
}

TEST_CASE("expansions", "[cf]") {
  const auto& F2 = GaloisField::get(2);
  CHECK(to_string(cf_expand(R(F2, "1", "Y"))) == "[0; Y]");
  CHECK(to_string(cf_expand(R(F2, "Y", "Y^2+1"))) == "[0; Y, Y]");
  const auto& F3 = GaloisField::get(3);
  const CfExpansion e = cf_expand(R(F3, "Y^2+1", "Y"));
  CHECK(e.a0 == P(F3, "Y"));
  CHECK(e.coeffs == std::vector<Poly>{P(F3, "Y")});
  CHECK_THROWS(cf_expand(R(F3, "Y^2+1")));
}

TEST_CASE("convergent tables", "[cf]") {
  const auto& F = GaloisField::get(2);
  const ConvergentTable t = convergents(cf_expand(R(F, "1", "Y")));
  REQUIRE(t.n() == 1);
  CHECK(t.P(-1) == P(F, "1"));
  CHECK(t.Q(-1).is_zero());
  CHECK(t.P(0).is_zero());
  CHECK(t.Q(0) == P(F, "1"));
  CHECK(t.P(1) == P(F, "1"));
  CHECK(t.Q(1) == P(F, "Y"));
  const ConvergentTable u = convergents(cf_expand(R(F, "Y", "Y^2+1")));
  CHECK(u.P(u.n()) == P(F, "Y"));
  CHECK(u.Q(u.n()) == P(F, "Y^2+1"));
}

TEST_CASE("approximation identity and its negative control", "[cf]") {
  const auto& F = GaloisField::get(2);
  const RationalFn f = R(F, "Y", "Y^2+1");
  const CfExpansion e = cf_expand(f);
  ConvergentTable t = convergents(e);
  CHECK(check_approx(e, t));
  CHECK(check_determinant(t));
  CHECK(check_recurrence(e, t));
  // |f - P0/Q0| = |f| = q^-1 = 1/(|Q0||Q1|).
  CHECK(f.abs_val().exponent == -1);
  t.P(1) = t.P(1) + P(F, "1");
  CHECK_FALSE(check_approx(e, t));
  CHECK_FALSE(check_determinant(t));
}

TEST_CASE("good approximations are convergents", "[cf]") {
  const auto& F = GaloisField::get(2);
  const RationalFn f = R(F, "Y", "Y^2+1");
  // f - 1/(Y+1) = -1/(Y+1)^2 sits exactly on the boundary |Q|^-2, so the
  // hypothesis fails and 1/(Y+1) need not (and does not) appear.
  CHECK((f - R(F, "1", "Y+1")) == -R(F, "1", "Y^2+1"));
  CHECK_FALSE(is_good_approximation(f, P(F, "1"), P(F, "Y+1")));
  CHECK_FALSE(is_convergent(f, P(F, "1"), P(F, "Y+1")));
  // 1/Y: |f - 1/Y| = q^-3 < q^-2.
  CHECK(is_good_approximation(f, P(F, "1"), P(F, "Y")));
  CHECK(is_convergent(f, P(F, "1"), P(F, "Y")));
  CHECK_FALSE(is_convergent(f, P(F, "1"), P(F, "Y^2")));
  const CfExpansion e = cf_expand(f);
  const ApproxCheck c = check_characterization(e, convergents(e));
  CHECK(c.ok);
  CHECK(c.hypotheses >= 1);
}

TEST_CASE("identity suite over small expansions", "[cf]") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    const int deg = q == 2 ? 4 : (q == 3 ? 3 : 2);
    const CfSuiteResult r = cf_identity_suite(F, deg);
    CAPTURE(q, r.first_failure);
    CHECK(r.failures == 0);
    CHECK(r.expansions > 0);
  }
}

TEST_CASE("denominator degrees strictly increase", "[cf]") {
  const auto& F = GaloisField::get(3);
  const std::uint64_t top = poly_count(F, 3);
  for (std::uint64_t br = 1; br < top; ++br)
    for (std::uint64_t ar = 0; ar < top; ++ar) {
      const RationalFn f(Poly::from_rank(F, ar), Poly::from_rank(F, br));
      if (f.is_poly()) continue;
      const ConvergentTable t = convergents(cf_expand(f));
      for (int i = 1; i < t.n(); ++i) REQUIRE(t.Q(i).degree() < t.Q(i + 1).degree());
    }
}

TEST_CASE("shortest solution examples", "[cf]") {
  const auto& F2 = GaloisField::get(2);
  CHECK(shortest_solution(P(F2, "1"), P(F2, "Y")) == LatticeVec{P(F2, "1"), Poly(F2)});
  CHECK(shortest_solution(P(F2, "Y"), P(F2, "Y+1")) == LatticeVec{P(F2, "1"), P(F2, "1")});
  const auto& F3 = GaloisField::get(3);
  CHECK(shortest_solution(P(F3, "2"), P(F3, "Y^2+Y")) == LatticeVec{P(F3, "2"), Poly(F3)});
  CHECK_THROWS(shortest_solution(P(F3, "Y"), P(F3, "Y^2")));
  CHECK(brute_force_shortest(P(F2, "1"), P(F2, "Y"), 2).best == LatticeVec{P(F2, "1"), Poly(F2)});
  CHECK_THROWS(brute_force_shortest(P(F2, "Y"), P(F2, "Y"), 2));
}

TEST_CASE("shortest solution against exhaustive scan", "[cf]") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    const ShortestSuiteResult r = shortest_suite(F, q == 2 ? 3 : 2);
    CAPTURE(q, r.first_mismatch);
    CHECK(r.mismatches == 0);
    // Ties only among units and zero.
    CHECK(r.unexpected_ties == 0);
    CHECK(r.non_unique > 0);
  }
}

TEST_CASE("uniqueness of the shortest solution away from constants", "[cf]") {
  const auto& F = GaloisField::get(3);
  const Poly a = P(F, "Y+1"), b = P(F, "Y^3+2Y+1");
  const BruteShortest bf = brute_force_shortest(a, b, 4);
  CHECK(bf.optima == 1);
  CHECK(bf.best == shortest_solution(a, b));
  const LatticeVec s = shortest_solution(a, b);
  CHECK(a * s.a + b * s.b == P(F, "1"));
  CHECK(s.a.degree() < b.degree());
}
