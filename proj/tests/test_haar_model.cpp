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

#include "fqlattice/haar_model.hpp"
#include "fqlattice/lattice_enum.hpp"

#include "catch_amalgamated.hpp"

using namespace fqlattice;

namespace {

Poly P(const GaloisField& F, const char* s) { return parse_poly(F, s); }
RationalFn R(const GaloisField& F, const char* num, const char* den = "1") { return RationalFn(P(F, num), P(F, den)); }
Rational Q(long n, long d = 1) { return Rational(BigInt(n), BigInt(d)); }

}  // namespace

TEST_CASE("zeta value at -1", "[constants]") {
  CHECK(zeta_minus1(2) == Q(1, 3));
  CHECK(zeta_minus1(3) == Q(1, 16));
  CHECK(zeta_minus1(4) == Q(1, 45));
  CHECK_THROWS(zeta_minus1(1));
}

TEST_CASE("sphere and quotient masses", "[constants]") {
  CHECK(sphere_mass(2) == Q(3, 4));
  CHECK(quotient_mass(2) == Q(1, 2));
  CHECK(sphere_mass(3) == Q(8, 9));
  CHECK(quotient_mass(3) == Q(1, 3));
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
    const Rational u = 1 - Q(1, q);
    CHECK(sphere_mass(q) == u + u - u * u);
    CHECK(sharp_mass(q) + nonsharp_mass(q) == sphere_mass(q));
  }
}

TEST_CASE("sharp mass from cells", "[constants]") {
  // Depth-1 cells are pairs of leading digits, not both zero; sharp ones have
  // a nonzero x digit.
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    const SphereCells sc(F, 1);
    Rational sharp = 0;
    for (std::uint64_t id = 0; id < sc.count(); ++id)
      if (sc.is_sharp(id)) sharp += sc.cylinder(id).mass();
    CHECK(sharp == sharp_mass(q));
  }
  CHECK(sharp_mass(2) == Q(1, 2));
}

TEST_CASE("hecke index closed form", "[hecke]") {
  const auto& F = GaloisField::get(2);
  CHECK(hecke_index(IdealSpec(P(F, "Y"))) == 3);
  CHECK(hecke_index(IdealSpec(P(F, "Y^2"))) == 6);
  CHECK(hecke_index(IdealSpec(P(F, "Y^2+Y"))) == 9);
  CHECK(hecke_index(IdealSpec::unit(F)) == 1);
}

TEST_CASE("hecke index against orbit count", "[hecke]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (const char* g : {"Y", "Y+1", "Y^2", "Y^2+Y+1", "Y^2+Y", "1"}) {
      const IdealSpec I(P(F, g));
      CAPTURE(q, g);
      CHECK(hecke_index_bruteforce(I) == hecke_index(I));
    }
  }
  const auto& F2 = GaloisField::get(2);
  CHECK(hecke_index_bruteforce(IdealSpec(P(F2, "Y"))) == 3);
  CHECK(hecke_index_bruteforce(IdealSpec(P(F2, "Y^3+Y+1"))) == hecke_index(IdealSpec(P(F2, "Y^3+Y+1"))));
  CHECK_THROWS(hecke_index_bruteforce(IdealSpec(P(F2, "Y^11")), 1024));
}

TEST_CASE("c_I and the main term", "[constants]") {
  const auto& F2 = GaloisField::get(2);
  CHECK(c_I(IdealSpec::unit(F2)) == Q(1, 4));
  for (int n = 0; n <= 6; ++n) CHECK(counting_main_term(IdealSpec::unit(F2), n) == Q(3, 2) * qpow(4, n));
  CHECK(counting_main_term(IdealSpec::unit(F2), 1) == 6);
  const auto& F3 = GaloisField::get(3);
  CHECK(counting_main_term(IdealSpec::unit(F3), 1) == 48);
  CHECK(counting_main_term(IdealSpec(P(F2, "Y")), 1) == 2);
  // main term = sphere * quotient * q^2n / c_I.
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    for (const char* g : {"1", "Y", "Y^2+1", "Y^2+Y"}) {
      const IdealSpec I(P(F, g));
      for (int n = 0; n <= 3; ++n)
        CHECK(counting_main_term(I, n) == sphere_mass(q) * quotient_mass(q) * qpow(q, 2 * n) / c_I(I));
    }
  }
}

TEST_CASE("box measure", "[constants]") {
  CHECK(box_measure(2, {Q(3, 8), 0, Q(1, 2)}) == Q(1, 4));
  CHECK(box_measure(2, {sharp_mass(2), 0, quotient_mass(2)}) == Q(1, 3));
  CHECK(box_measure(3, {0, 4, Q(1, 3)}) == 0);
  for (int n = 0; n < 4; ++n)
    CHECK(box_measure(3, {Q(1, 9), 2 * n, Q(1, 9)}) * qpow(3, 4) == box_measure(3, {Q(1, 9), 2 * n + 2, Q(1, 9)}));
}

TEST_CASE("sl2 orders", "[sl2]") {
  CHECK(sl2_order_mod(2, 1) == 6);
  CHECK(sl2_order_mod(3, 1) == 24);
  CHECK(sl2_order_mod(2, 2) == 48);
  CHECK(sl2_order_mod_bruteforce(GaloisField::get(2), 1) == 6);
  CHECK(sl2_order_mod_bruteforce(GaloisField::get(2), 2) == 48);
  CHECK(sl2_order_mod_bruteforce(GaloisField::get(3), 1) == 24);
  CHECK(sl2_order_mod_bruteforce(GaloisField::get(2), 3) == sl2_order_mod(2, 3));
  CHECK(sl2_order_mod_bruteforce(GaloisField::get(4), 1) == sl2_order_mod(4, 1));
  CHECK_THROWS(sl2_order_mod_bruteforce(GaloisField::get(2), 5));
  CHECK_THROWS(sl2_order_mod(2, 0));
}

TEST_CASE("kernel measure two ways", "[sl2]") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u})
    for (int N = 1; N <= 4; ++N) {
      CHECK(kernel_measure_by_index(q, N) == kernel_measure_by_lu(q, N));
      const BigInt QQ = q;
      CHECK(kernel_measure_by_index(q, N) == Rational(QQ * QQ, QQ * QQ - 1) * qpow(q, -3 * N));
    }
}

TEST_CASE("refined LU examples", "[lu]") {
  const auto& F = GaloisField::get(2);
  const RefinedLU id = refined_lu(Mat2::identity(F));
  CHECK(id.u_minus == Mat2::identity(F));
  CHECK(id.m == Mat2::identity(F));
  CHECK(id.a == Mat2::identity(F));
  CHECK(id.u_plus == Mat2::identity(F));

  const Mat2 g = gamma_of({P(F, "Y"), P(F, "1")});
  CHECK(g == Mat2{R(F, "Y"), R(F, "1"), R(F, "1"), RationalFn(F)});
  const RefinedLU lu = refined_lu(g);
  CHECK(lu.u_minus == Mat2::lower(R(F, "1", "Y")));
  CHECK(lu.m == Mat2::identity(F));
  CHECK(lu.a == Mat2::diag(R(F, "Y"), R(F, "1", "Y")));
  CHECK(lu.u_plus == Mat2::upper(R(F, "1", "Y")));
  CHECK(lu.product() == g);
  CHECK_THROWS(refined_lu(Mat2{RationalFn(F), R(F, "1"), R(F, "1"), RationalFn(F)}));
}

TEST_CASE("refined LU over every gamma_v", "[lu]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 0; n <= (q == 2 ? 3 : 2); ++n) {
      EnumFilter flt;
      flt.level = n;
      flt.hemisphere = Hemisphere::SHARP;
      enumerate_primitive(F, flt, [&](const LatticeVec& v) {
        const Mat2 g = gamma_of(v);
        const RefinedLU lu = refined_lu(g);
        REQUIRE(g.is_unimodular());
        REQUIRE(lu.product() == g);
        REQUIRE(lu.p().in_unit_ball());
        REQUIRE(lu.omega_alpha == -n);
      });
    }
  }
}
